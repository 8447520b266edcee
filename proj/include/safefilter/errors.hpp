#ifndef SAFEFILTER_ERRORS_HPP_
#define SAFEFILTER_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace safefilter {

/// Vectors combined in one operation have different lengths.
class DimensionMismatch : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Base of the errors a controller can raise while the closed loop runs.
class SafetyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// The state penetrated the minimum-distance shell where the potential is undefined.
class InsideObstacle : public SafetyError
{
public:
  using SafetyError::SafetyError;
};

/// A direction or gradient needed by the computation vanished.
class DegenerateDirection : public SafetyError
{
public:
  using SafetyError::SafetyError;
};

/// L_g h = 0 while the drift violates the barrier condition.
class InfeasibleConstraint : public SafetyError
{
public:
  using SafetyError::SafetyError;
};

/// The scan contains no hits, so no scan barrier exists.
class NoObstacleInView : public SafetyError
{
public:
  using SafetyError::SafetyError;
};

inline void require_same_size(long a, long b, const char * where)
{
  if (a != b) {
    throw DimensionMismatch(std::string(where) + ": dimension mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
  }
}

}  // namespace safefilter

#endif  // SAFEFILTER_ERRORS_HPP_
