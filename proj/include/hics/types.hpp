#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

namespace hics {

using Index = Eigen::Index;
using cplx = std::complex<double>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

/// Squared modulus, valid for real and complex scalars.
template <typename Scalar>
inline double abs2(const Scalar& v) {
  if constexpr (is_complex_v<Scalar>) {
    return std::norm(v);
  } else {
    return static_cast<double>(v) * static_cast<double>(v);
  }
}

/// Field of a scalar type, as used in file headers and configs.
enum class Field { real, complex };

template <typename Scalar>
constexpr Field field_of() {
  return is_complex_v<Scalar> ? Field::complex : Field::real;
}

inline const char* to_string(Field f) { return f == Field::real ? "real" : "complex"; }

/// Violated parameter bound (sparsity larger than a dimension, bad index, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shapes that do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exact enumeration would exceed the configured support budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(double count, double cap)
      : std::runtime_error("enumeration budget exceeded: " + std::to_string(static_cast<long double>(count)) +
                           " supports requested, cap " + std::to_string(static_cast<long double>(cap))),
        count_(count),
        cap_(cap) {}

  double count() const { return count_; }
  double cap() const { return cap_; }

 private:
  double count_;
  double cap_;
};

}  // namespace hics
