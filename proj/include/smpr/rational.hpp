#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace smpr {

// Exact arithmetic used wherever moments have closed forms. Hankel matrices
// are catastrophically ill-conditioned, so moment generation and the LDL^T
// factorization run in rationals and convert to double only at the boundary.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact rational equal to the given double (every finite double is rational).
inline Rational exact(double x) { return Rational(x); }

inline BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// (n-1)!! with the empty-product conventions (-1)!! = 1!! = 1.
inline BigInt double_factorial(int n) {
    BigInt f = 1;
    for (int i = n; i >= 2; i -= 2) f *= i;
    return f;
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt num = 1;
    for (int i = 0; i < k; ++i) num *= (n - i);
    return num / factorial(k);
}

/// n-th Catalan number C_n = binom(2n,n)/(n+1).
inline BigInt catalan(int n) { return binomial(2 * n, n) / (n + 1); }

/// Raising factorial x^(n) = x (x+1) ... (x+n-1).
inline Rational raising_factorial(const Rational& x, int n) {
    Rational p = 1;
    for (int i = 0; i < n; ++i) p *= x + i;
    return p;
}

inline Rational pow_rational(const Rational& x, int n) {
    Rational p = 1;
    for (int i = 0; i < n; ++i) p *= x;
    return p;
}

}  // namespace smpr
