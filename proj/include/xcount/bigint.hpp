#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace xcount {

/// Model counts routinely exceed 2^64 once a model has more than 64 guards.
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const BigInt& v) { return v.str(); }

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

} // namespace xcount
