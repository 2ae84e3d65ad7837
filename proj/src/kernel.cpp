#include "rkhs/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "rkhs/errors.hpp"
#include "rkhs/format.hpp"

namespace rkhs {

namespace {

KernelSpec base_spec(Family f, int d)
{
    KernelSpec k;
    k.family = f;
    k.d = d;
    return k;
}

} // namespace

KernelSpec KernelSpec::hardy(int d) { return base_spec(Family::hardy, d); }
KernelSpec KernelSpec::drury_arveson(int d) { return base_spec(Family::drury_arveson, d); }

KernelSpec KernelSpec::h_s(double s, int d)
{
    KernelSpec k = base_spec(Family::h_s, d);
    k.s = s;
    return k;
}

KernelSpec KernelSpec::dirichlet(int d) { return h_s(-1.0, d); }

KernelSpec KernelSpec::besov_sobolev(double sigma, int d)
{
    KernelSpec k = base_spec(Family::besov_sobolev, d);
    k.sigma = sigma;
    return k;
}

KernelSpec KernelSpec::bergman(int d) { return base_spec(Family::bergman_disc, d); }

KernelSpec KernelSpec::custom(std::vector<double> coefficients, int d, bool unnormalized)
{
    KernelSpec k = base_spec(Family::custom, d);
    k.coefficients = std::move(coefficients);
    k.unnormalized = unnormalized;
    return k;
}

void KernelSpec::validate() const
{
    if (d < 1)
        throw ParameterDomainError("ambient dimension must be >= 1, got " + std::to_string(d));
    switch (family) {
    case Family::h_s:
        if (!(s <= 0.0) || !std::isfinite(s))
            throw ParameterDomainError("h_s requires s <= 0, got " + format_double(s));
        break;
    case Family::besov_sobolev:
        if (!(sigma > 0.0 && sigma <= 1.0))
            throw ParameterDomainError("besov_sobolev requires 0 < sigma <= 1, got " + format_double(sigma));
        break;
    case Family::custom:
        if (coefficients.empty())
            throw ParameterDomainError("custom kernel needs at least one coefficient");
        for (std::size_t n = 0; n < coefficients.size(); ++n)
            if (!(coefficients[n] > 0.0) || !std::isfinite(coefficients[n]))
                throw ParameterDomainError("custom coefficient a_" + std::to_string(n) +
                                           " must be positive, got " + format_double(coefficients[n]));
        if (!unnormalized && coefficients[0] != 1.0)
            throw ParameterDomainError("custom coefficients must start with 1 unless marked unnormalized");
        break;
    default:
        break;
    }
}

std::string KernelSpec::name() const
{
    switch (family) {
    case Family::h_s:
        if (s == -1.0)
            return "dirichlet";
        return "h_s(s=" + format_double(s) + ")";
    case Family::besov_sobolev:
        return "besov_sobolev(sigma=" + format_double(sigma) + ")";
    default:
        return family_name(family);
    }
}

Family parse_family(const std::string& name)
{
    if (name == "hardy")
        return Family::hardy;
    if (name == "drury_arveson" || name == "da")
        return Family::drury_arveson;
    if (name == "h_s" || name == "hs")
        return Family::h_s;
    if (name == "besov_sobolev" || name == "k_sigma")
        return Family::besov_sobolev;
    if (name == "bergman_disc" || name == "bergman")
        return Family::bergman_disc;
    if (name == "custom")
        return Family::custom;
    throw ParameterDomainError("unknown kernel family '" + name + "'");
}

std::string family_name(Family f)
{
    switch (f) {
    case Family::hardy: return "hardy";
    case Family::drury_arveson: return "drury_arveson";
    case Family::h_s: return "h_s";
    case Family::besov_sobolev: return "besov_sobolev";
    case Family::bergman_disc: return "bergman_disc";
    case Family::custom: return "custom";
    }
    return "unknown";
}

KernelSpec kernel_from_name(const std::string& name, int d, double s, double sigma)
{
    if (name == "dirichlet")
        return KernelSpec::dirichlet(d);
    KernelSpec spec = base_spec(parse_family(name), d);
    spec.s = s;
    spec.sigma = sigma;
    return spec;
}

// ---------------------------------------------------------------------------

CoeffTable::CoeffTable(std::vector<double> a, bool normalized)
    : a_(std::move(a)), normalized_(normalized)
{
    if (a_.empty())
        throw ArgumentError("coefficient table needs a_0");
    if (normalized_ && a_[0] != 1.0)
        throw ArgumentError("normalized table requires a_0 = 1");
}

CoeffTable::CoeffTable(std::vector<double> a, std::vector<double> b, bool normalized)
    : CoeffTable(std::move(a), normalized)
{
    if (b.size() != a_.size())
        throw ArgumentError("b storage must have N+1 entries (b[0] unused)");
    b_ = std::move(b);
    b_[0] = 0.0;
}

double CoeffTable::b(int n) const
{
    if (b_.empty())
        throw ArgumentError("table has no b coefficients; call invert_series first");
    if (n < 1 || n > order())
        throw OutOfRangeError("b_" + std::to_string(n) + " outside 1.." + std::to_string(order()));
    return b_[n];
}

double CoeffTable::cnp_margin() const
{
    if (b_.empty())
        throw ArgumentError("table has no b coefficients");
    double m = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= order(); ++n)
        m = std::min(m, b_[n]);
    return m;
}

CoeffTable compute_a(const KernelSpec& spec, int N)
{
    if (N < 0)
        throw ArgumentError("truncation order must be >= 0");
    spec.validate();
    std::vector<double> a(N + 1);
    switch (spec.family) {
    case Family::hardy:
    case Family::drury_arveson:
        std::fill(a.begin(), a.end(), 1.0);
        break;
    case Family::h_s:
        for (int n = 0; n <= N; ++n)
            a[n] = spec.s == 0.0 ? 1.0 : std::pow(static_cast<double>(n + 1), spec.s);
        break;
    case Family::besov_sobolev:
        // binomial series of (1-t)^{-sigma}
        a[0] = 1.0;
        for (int n = 1; n <= N; ++n)
            a[n] = a[n - 1] * (spec.sigma + n - 1) / n;
        break;
    case Family::bergman_disc:
        for (int n = 0; n <= N; ++n)
            a[n] = n + 1.0;
        break;
    case Family::custom:
        if (static_cast<std::size_t>(N) >= spec.coefficients.size())
            throw ArgumentError("custom kernel has only " + std::to_string(spec.coefficients.size()) +
                                " coefficients, N = " + std::to_string(N) + " requested");
        std::copy_n(spec.coefficients.begin(), N + 1, a.begin());
        break;
    }
    const bool normalized = !(spec.family == Family::custom && spec.unnormalized) || a[0] == 1.0;
    return CoeffTable(std::move(a), normalized);
}

CoeffTable invert_series(const CoeffTable& table)
{
    const auto& a = table.a();
    if (a[0] == 0.0)
        throw DivisionDomainError("a_0 = 0: power series is not invertible");
    const int N = table.order();
    std::vector<double> b(N + 1, 0.0);
    for (int m = 1; m <= N; ++m) {
        double acc = a[m];
        for (int n = 1; n < m; ++n)
            acc -= b[n] * a[m - n];
        b[m] = acc / a[0];
    }
    return CoeffTable(a, std::move(b), table.normalized());
}

CoeffTable make_table(const KernelSpec& spec, int N)
{
    return invert_series(compute_a(spec, N));
}

double recursion_residual(const CoeffTable& table)
{
    const auto& a = table.a();
    double worst = 0.0;
    for (int m = 1; m <= table.order(); ++m) {
        double acc = 0.0;
        for (int n = 1; n <= m; ++n)
            acc += table.b(n) * a[m - n];
        worst = std::max(worst, std::abs(a[m] - acc) / std::abs(a[m]));
    }
    return worst;
}

CnpVerdict is_cnp(const CoeffTable& table, double tol)
{
    CnpVerdict v;
    v.tolerance = tol;
    for (int n = 1; n <= table.order(); ++n) {
        if (table.b(n) < -tol) {
            v.pass = false;
            v.first_negative_index = n;
            v.value = table.b(n);
            return v;
        }
    }
    return v;
}

RegularityProfile regularity_profile(const CoeffTable& table)
{
    const int N = table.order();
    if (N < 4)
        throw ArgumentError("regularity profile needs N >= 4");
    RegularityProfile p;
    p.ratios.resize(N);
    for (int n = 0; n < N; ++n)
        p.ratios[n] = table.a(n) / table.a(n + 1);
    p.tail_start = (3 * N) / 4;
    for (int n = p.tail_start; n < N; ++n)
        p.tail_deviation = std::max(p.tail_deviation, std::abs(p.ratios[n] - 1.0));
    return p;
}

SummabilityReport classify_summability(const CoeffTable& table, double tol)
{
    SummabilityReport r;
    r.tolerance = tol;
    for (double x : table.a())
        r.a_sum += x;
    const int N = table.order();
    r.b_partial_sums.assign(N + 1, 0.0);
    for (int n = 1; n <= N; ++n) {
        r.b_partial_sums[n] = r.b_partial_sums[n - 1] + table.b(n);
        if (r.b_partial_sums[n] < r.b_partial_sums[n - 1])
            r.b_partial_sums_monotone = false;
    }
    r.b_sum = r.b_partial_sums[N];
    r.b_gap = 1.0 - r.b_sum;
    r.cnp = is_cnp(table, tol).pass;
    r.b_sum_within_unit = r.b_sum <= 1.0 + tol;
    return r;
}

namespace {

void check_domain(const Point& z, bool allow_boundary, const char* which)
{
    const double r = z.norm();
    if (allow_boundary ? r > 1.0 : r >= 1.0)
        throw DomainError(std::string("point ") + which + " has norm " + format_double(r) +
                          (allow_boundary ? " > 1" : " >= 1"));
}

} // namespace

KernelValue kernel_eval(const CoeffTable& table, const Point& z, const Point& w, bool allow_boundary)
{
    if (z.size() != w.size())
        throw ShapeError("points of different dimension");
    check_domain(z, allow_boundary, "z");
    check_domain(w, allow_boundary, "w");
    const std::complex<double> t = w.dot(z);  // <z,w> = sum z_j conj(w_j)
    const int N = table.order();
    // Horner
    std::complex<double> acc = table.a(N);
    for (int n = N - 1; n >= 0; --n)
        acc = acc * t + table.a(n);
    KernelValue kv;
    kv.value = acc;
    kv.order = N;
    const double r = std::abs(t);
    kv.tail_estimate = r < 1.0 ? table.a(N) * std::pow(r, N + 1) / (1.0 - r)
                               : std::numeric_limits<double>::infinity();
    if (r == 0.0)
        kv.tail_estimate = 0.0;
    return kv;
}

KernelValue kernel_eval(const KernelSpec& spec, const Point& z, const Point& w, int N, bool allow_boundary)
{
    if (z.size() != spec.d || w.size() != spec.d)
        throw ShapeError("point dimension does not match kernel dimension d = " + std::to_string(spec.d));
    return kernel_eval(compute_a(spec, N), z, w, allow_boundary);
}

CoeffTable perturb_kernel(const CoeffTable& table, double eps)
{
    if (!(eps > 0.0 && eps <= 1.0))
        throw ParameterDomainError("eps must lie in (0,1], got " + format_double(eps));
    if (!table.normalized())
        throw ArgumentError("perturb_kernel expects a normalized table");
    std::vector<double> a = table.a();
    a[0] = eps;
    return CoeffTable(std::move(a), eps == 1.0);
}

// ---------------------------------------------------------------------------

KernelConfig kernel_config_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("family"))
        throw ParseError("kernel spec must be an object with a \"family\" field");
    KernelConfig cfg;
    try {
        const int d = j.value("d", 1);
        const std::string name = j.at("family").get<std::string>();
        cfg.spec = kernel_from_name(name, d, j.value("s", 0.0), j.value("sigma", 1.0));
        if (cfg.spec.family == Family::custom) {
            cfg.spec.coefficients = j.at("coefficients").get<std::vector<double>>();
            cfg.spec.unnormalized = j.value("unnormalized", false);
        }
        if (j.contains("N"))
            cfg.N = j.at("N").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad kernel spec: ") + e.what());
    }
    cfg.spec.validate();
    return cfg;
}

nlohmann::json to_json(const KernelSpec& spec, std::optional<int> N)
{
    nlohmann::json j;
    j["family"] = family_name(spec.family);
    j["d"] = spec.d;
    if (spec.family == Family::h_s)
        j["s"] = spec.s;
    if (spec.family == Family::besov_sobolev)
        j["sigma"] = spec.sigma;
    if (spec.family == Family::custom) {
        j["coefficients"] = spec.coefficients;
        if (spec.unnormalized)
            j["unnormalized"] = true;
    }
    if (N)
        j["N"] = *N;
    return j;
}

void write_csv(std::ostream& os, const CoeffTable& table)
{
    os << "n,a_n,b_n\n";
    for (int n = 0; n <= table.order(); ++n) {
        os << n << ',' << format_double(table.a(n)) << ',';
        if (n >= 1 && table.has_b())
            os << format_double(table.b(n));
        os << '\n';
    }
}

} // namespace rkhs
