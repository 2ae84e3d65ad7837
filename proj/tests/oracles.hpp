#pragma once

// Exact-arithmetic reference values used by the tests.

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace oracle {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

inline std::vector<cpp_rational> hardy_a(int N) { return std::vector<cpp_rational>(N + 1, cpp_rational(1)); }

inline std::vector<cpp_rational> bergman_a(int N)
{
    std::vector<cpp_rational> a;
    for (int n = 0; n <= N; ++n)
        a.emplace_back(n + 1);
    return a;
}

// (n+1)^s for integer s <= 0
inline std::vector<cpp_rational> hs_a(int s, int N)
{
    std::vector<cpp_rational> a;
    for (int n = 0; n <= N; ++n) {
        cpp_int den = 1;
        for (int k = 0; k < -s; ++k)
            den *= n + 1;
        a.emplace_back(cpp_rational(1, den));
    }
    return a;
}

// Binomial series of (1-t)^(-p/q).
inline std::vector<cpp_rational> besov_a(int p, int q, int N)
{
    std::vector<cpp_rational> a{cpp_rational(1)};
    const cpp_rational sigma(p, q);
    for (int n = 1; n <= N; ++n)
        a.push_back(a.back() * (sigma + (n - 1)) / n);
    return a;
}

// b_m = (a_m - sum_{n<m} b_n a_{m-n}) / a_0, index 0 unused.
inline std::vector<cpp_rational> invert(const std::vector<cpp_rational>& a)
{
    std::vector<cpp_rational> b(a.size(), cpp_rational(0));
    for (std::size_t m = 1; m < a.size(); ++m) {
        cpp_rational acc = a[m];
        for (std::size_t n = 1; n < m; ++n)
            acc -= b[n] * a[m - n];
        b[m] = acc / a[0];
    }
    return b;
}

inline cpp_int factorial(int n)
{
    cpp_int f = 1;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

inline cpp_int multinomial(const std::vector<int>& alpha)
{
    int n = 0;
    cpp_int den = 1;
    for (int e : alpha) {
        n += e;
        den *= factorial(e);
    }
    return factorial(n) / den;
}

inline double to_double(const cpp_rational& r) { return static_cast<double>(r); }

} // namespace oracle
