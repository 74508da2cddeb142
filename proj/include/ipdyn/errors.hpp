#pragma once

#include <stdexcept>
#include <string>

namespace ipdyn {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Config document could not be parsed (carries a position/path hint in the message).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

/// A model invariant is violated; `path()` names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Coupling argument left the feasible interval; carries delta and the interval.
class CouplingSingularityError : public Error {
 public:
  CouplingSingularityError(double delta, double lo, double hi)
      : Error("coupling singularity at delta=" + std::to_string(delta) +
              ", feasible interval (" + std::to_string(lo) + ", " + std::to_string(hi) + ")"),
        delta_(delta),
        lo_(lo),
        hi_(hi) {}
  double delta() const { return delta_; }
  double feasible_lo() const { return lo_; }
  double feasible_hi() const { return hi_; }

 private:
  double delta_, lo_, hi_;
};

/// Requested frame name does not exist in the model.
class UnknownFrameError : public Error {
 public:
  explicit UnknownFrameError(const std::string& frame)
      : Error("unknown frame: " + frame) {}
};

/// Generalized inertia could not be factorized; carries a min-eigenvalue estimate.
class NearSingularError : public Error {
 public:
  explicit NearSingularError(double min_eig)
      : Error("generalized inertia near singular (min eigenvalue estimate " +
              std::to_string(min_eig) + ")"),
        min_eig_(min_eig) {}
  double min_eigenvalue() const { return min_eig_; }

 private:
  double min_eig_;
};

/// A supplied transform derivative is not consistent with a rigid motion.
class InconsistentDerivativeError : public Error {
 public:
  explicit InconsistentDerivativeError(double defect)
      : Error("transform derivative inconsistent (skew defect " +
              std::to_string(defect) + ")"),
        defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

}  // namespace ipdyn
