#pragma once

// Quad precision scalar usable inside Eigen expressions.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

namespace sigma2 {

using Extended = boost::multiprecision::float128;

} // namespace sigma2
