#pragma once

#include <complex>
#include <limits>
#include <sstream>
#include <string>

namespace rkhs {

/// Round-trip decimal formatting (17 significant digits, '.' separator).
inline std::string format_double(double x)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(std::numeric_limits<double>::max_digits10);
    os << x;
    return os.str();
}

inline std::string format_complex(std::complex<double> z)
{
    return format_double(z.real()) + "," + format_double(z.imag());
}

} // namespace rkhs
