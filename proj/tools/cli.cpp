#include "cli.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "rkhs/dilation.hpp"
#include "rkhs/errors.hpp"
#include "rkhs/format.hpp"
#include "rkhs/kernel.hpp"
#include "rkhs/model.hpp"
#include "rkhs/operators.hpp"
#include "rkhs/pick.hpp"
#include "rkhs/polyspace.hpp"
#include "rkhs/sampling.hpp"

namespace rkhs::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

KernelSpec spec_of(const Settings& s)
{
    KernelSpec spec = kernel_from_name(s.family, s.d, s.s, s.sigma);
    if (spec.family == Family::custom) {
        if (!s.config.contains("coefficients"))
            throw UsageError("custom family needs \"coefficients\" in the config file");
        spec.coefficients = s.config.at("coefficients").get<std::vector<double>>();
        spec.unnormalized = s.config.value("unnormalized", false);
    }
    spec.validate();
    return spec;
}

KernelSpec named_spec(const std::string& name, int d)
{
    KernelSpec spec = kernel_from_name(name, d, 0.0, 1.0);
    spec.validate();
    return spec;
}

int order_or(const Settings& s, int fallback) { return s.N < 0 ? fallback : s.N; }
double tol_or(const Settings& s, double fallback) { return s.tol < 0 ? fallback : s.tol; }

nlohmann::json verdict_json(const PsdVerdict& v)
{
    return {{"min_eigenvalue", v.min_eigenvalue},
            {"size", v.size},
            {"tolerance", v.tolerance},
            {"scale", v.scale},
            {"verdict", v.psd ? "psd" : "not_psd"}};
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> b_values(const CoeffTable& t)
{
    const auto& b = t.b_storage();
    return b.empty() ? std::vector<double>{} : std::vector<double>(b.begin() + 1, b.end());
}

OperatorTuple load_tuple(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open " + path);
    return read_tuple(in);
}

TruncationOrder parse_order(const std::string& text)
{
    if (text == "auto")
        return auto_nilpotent;
    try {
        std::size_t pos = 0;
        const int m = std::stoi(text, &pos);
        if (pos == text.size())
            return m;
    } catch (const std::logic_error&) {
    }
    throw UsageError("--order must be 'auto' or an integer");
}

// Zero-constant restriction of the truncated shift, compared with the b_m/a_m oracle.
nlohmann::json restriction_check(const CoeffTable& table, const MonomialBasis& basis, double tol, bool& pass)
{
    const OperatorTuple s = shift_tuple(basis);
    const int n = basis.size();
    const Matrix q = Matrix::Identity(n, n).rightCols(n - 1);
    const HereditaryResult h = hereditary_1k(compress(s, q), table, auto_nilpotent);
    std::vector<double> predicted;
    for (int m = 1; m <= basis.max_degree(); ++m)
        for (std::uint64_t k = 0; k < homogeneous_dimension(basis.d(), m); ++k)
            predicted.push_back(table.b(m) / table.a(m));
    std::sort(predicted.begin(), predicted.end());
    double dev = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        dev = std::max(dev, std::abs(predicted[i] - h.eigenvalues[static_cast<Eigen::Index>(i)]));
    pass = dev <= tol;
    return {{"eigenvalues", to_vector(h.eigenvalues)},
            {"predicted", predicted},
            {"max_deviation", dev},
            {"tolerance", tol},
            {"verdict", pass ? "pass" : "fail"}};
}

nlohmann::json projection_check(const CoeffTable& table, const MonomialBasis& basis, double tol, bool& pass)
{
    const HereditaryResult h = hereditary_1k(shift_tuple(basis), table, auto_nilpotent);
    Matrix p = Matrix::Zero(basis.size(), basis.size());
    p(0, 0) = 1.0;
    const double dist = spectral_norm(h.D - p);
    int rank = 0;
    for (Eigen::Index i = 0; i < h.eigenvalues.size(); ++i)
        rank += h.eigenvalues[i] > 0.5 ? 1 : 0;
    pass = dist <= tol && rank == 1;
    return {{"distance_to_constants_projection", dist},
            {"rank", rank},
            {"eigenvalues", to_vector(h.eigenvalues)},
            {"tolerance", tol},
            {"verdict", pass ? "rank-1 projection" : "fail"}};
}

nlohmann::json technical_check(const CoeffTable& table, const MonomialBasis& basis, std::uint64_t seed, double tol,
                               bool& pass)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    double worst = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (int m = 1; m <= basis.max_degree(); ++m) {
        HomogeneousPolynomial p{m, Eigen::VectorXcd(basis.degree_count(m))};
        for (Eigen::Index i = 0; i < p.coeffs.size(); ++i)
            p.coeffs[i] = {g(rng), g(rng)};
        for (int n = 1; n <= m; ++n) {
            const TechnicalIdentity t = technical_identity_check(basis, table, n, p);
            worst = std::max(worst, t.residual);
            rows.push_back({{"m", m}, {"n", n}, {"factor", t.factor}, {"residual", t.residual}});
        }
    }
    pass = worst <= tol;
    return {{"cases", rows}, {"max_residual", worst}, {"tolerance", tol}, {"verdict", pass ? "pass" : "fail"}};
}

nlohmann::json hereditary_json(const HereditaryResult& h, double tol)
{
    const char* kind = h.tail.kind == TailBound::Kind::exact   ? "exact"
                       : h.tail.kind == TailBound::Kind::bound ? "bound"
                                                               : "inconclusive";
    nlohmann::json tail = {{"kind", kind}};
    if (std::isfinite(h.tail.value))
        tail["value"] = h.tail.value;
    return {{"order_used", h.order_used},
            {"eigenvalues", to_vector(h.eigenvalues)},
            {"min_eigenvalue", h.min_eigenvalue},
            {"hermitian_defect", h.hermitian_defect},
            {"tail", tail},
            {"tolerance", tol},
            {"verdict", h.positive(tol) ? "psd" : "not_psd"}};
}

Matrix ideal_embedding(const std::string& path, const MonomialBasis& basis)
{
    const HomogeneousIdeal ideal = ideal_from_json(read_json_file(path));
    return complement_basis(ideal, basis).embedding();
}

std::string csv_field(const std::string& v)
{
    if (v.find_first_of(",\"\n") == std::string::npos)
        return v;
    std::string out = "\"";
    for (char c : v)
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

void flatten(const nlohmann::json& j, const std::string& key, std::ostringstream& os)
{
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten(v, key.empty() ? k : key + "." + k, os);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], key + "[" + std::to_string(i) + "]", os);
    } else {
        std::string value;
        if (j.is_number_float())
            value = format_double(j.get<double>());
        else if (j.is_string())
            value = j.get<std::string>();
        else if (!j.is_null())
            value = j.dump();
        os << csv_field(key) << ',' << csv_field(value) << '\n';
    }
}

} // namespace

std::string flatten_csv(const nlohmann::json& report)
{
    std::ostringstream os;
    os << "key,value\n";
    flatten(report, "", os);
    return os.str();
}

// ---------------------------------------------------------------------------

Outcome cmd_kernel(const Settings& s)
{
    const int N = order_or(s, 20);
    const double tol = tol_or(s, kDefaultCnpTol);
    const KernelSpec spec = spec_of(s);
    const CoeffTable table = make_table(spec, N);
    const CnpVerdict v = is_cnp(table, tol);
    const SummabilityReport sum = classify_summability(table, tol);

    Outcome o;
    o.report = {{"operation", "kernel"},
                {"config", {{"kernel", to_json(spec, N)}, {"tol", tol}}},
                {"a", table.a()},
                {"b", b_values(table)},
                {"recursion_residual", recursion_residual(table)},
                {"cnp",
                 {{"pass", v.pass},
                  {"first_negative_index", v.first_negative_index},
                  {"value", v.value},
                  {"tolerance", v.tolerance}}},
                {"cnp_summary", v.pass ? std::string("pass") : "fail(n=" + std::to_string(v.first_negative_index) + ")"},
                {"summability",
                 {{"a_sum", sum.a_sum},
                  {"b_sum", sum.b_sum},
                  {"b_gap", sum.b_gap},
                  {"b_sum_within_unit", sum.b_sum_within_unit},
                  {"b_partial_sums_monotone", sum.b_partial_sums_monotone}}}};
    if (N >= 4) {
        const RegularityProfile r = regularity_profile(table);
        o.report["regularity"] = {{"ratios", r.ratios}, {"tail_start", r.tail_start}, {"tail_deviation", r.tail_deviation}};
    }
    std::ostringstream csv;
    write_csv(csv, table);
    o.csv = csv.str();
    o.code = v.pass ? kPass : kVerdictFailure;
    return o;
}

Outcome cmd_pick(const Settings& s)
{
    const int N = order_or(s, 200);
    const double tol = tol_or(s, kDefaultPsdTol);
    Outcome o;
    if (!s.numerator.empty() || !s.denominator.empty()) {
        if (s.numerator.empty() || s.denominator.empty())
            throw UsageError("quotient test needs both --numerator and --denominator");
        const KernelSpec num = named_spec(s.numerator, s.d);
        const KernelSpec den = named_spec(s.denominator, s.d);
        const auto pts = ball_sample(s.d, s.points, s.radius, s.seed);
        const QuotientGram q = kernel_quotient_gram(num, den, pts, N, tol);
        o.report = {{"operation", "kernel_quotient"},
                    {"config",
                     {{"numerator", to_json(num, N)},
                      {"denominator", to_json(den, N)},
                      {"points", s.points},
                      {"radius", s.radius},
                      {"seed", s.seed},
                      {"tol", tol}}},
                    {"verdict", verdict_json(q.verdict)}};
        if (const auto minor = find_negative_principal_minor(q.gram, tol))
            o.report["negative_minor"] = {{"i", minor->i}, {"j", minor->j}, {"determinant", minor->determinant}};
        o.code = q.verdict.psd ? kPass : kVerdictFailure;
        return o;
    }

    nlohmann::json pj;
    if (!s.problem.empty())
        pj = read_json_file(s.problem);
    else if (s.config.contains("problem"))
        pj = s.config.at("problem").is_string() ? read_json_file(s.config.at("problem").get<std::string>())
                                                : s.config.at("problem");
    else
        throw UsageError("pick needs --problem FILE or --numerator/--denominator");
    const PickProblem problem = pick_problem_from_json(pj);
    Settings ks = s;
    ks.d = problem.d;
    const KernelSpec spec = spec_of(ks);
    const PsdVerdict v = is_psd(pick_matrix(problem, spec, N), tol);
    o.report = {{"operation", "pick"},
                {"config", {{"kernel", to_json(spec, N)}, {"problem", to_json(problem)}, {"tol", tol}}},
                {"verdict", verdict_json(v)}};
    o.code = v.psd ? kPass : kVerdictFailure;
    if (s.sweep) {
        double wmax = 0.0;
        for (const auto& w : problem.targets)
            wmax = std::max(wmax, spectral_norm(w));
        if (wmax == 0.0)
            throw UsageError("sweep needs a nonzero target");
        const double upper = 1.0 / wmax;
        const double bisect_tol = 1e-9;
        const double threshold = feasibility_threshold(problem, spec, N, upper, bisect_tol, tol);
        std::vector<double> scales;
        const int steps = std::max(s.steps, 2);
        for (int k = 0; k < steps; ++k)
            scales.push_back(upper * k / (steps - 1));
        nlohmann::json rows = nlohmann::json::array();
        std::ostringstream csv;
        write_verdict_header(csv);
        for (const auto& r : feasibility_sweep(problem, spec, N, scales, tol)) {
            rows.push_back({{"scale", r.scale}, {"verdict", verdict_json(r.verdict)}});
            write_verdict_row(csv, format_double(r.scale), r.verdict);
        }
        o.report["sweep"] = {{"threshold", threshold}, {"bisection_tolerance", bisect_tol}, {"rows", rows}};
        o.csv = csv.str();
        o.code = kPass;
    }
    return o;
}

Outcome cmd_model(const Settings& s)
{
    const int N = order_or(s, 4);
    const double tol = tol_or(s, kDefaultPositivityTol);
    const KernelSpec spec = spec_of(s);
    const CoeffTable table = make_table(spec, N);
    const MonomialBasis basis(table, s.d, N);
    Outcome o;
    o.report = {{"operation", "model"}, {"config", {{"kernel", to_json(spec, N)}, {"tol", tol}, {"seed", s.seed}}}};

    if (!s.check.empty()) {
        bool pass = false;
        if (s.check == "restriction")
            o.report["restriction"] = restriction_check(table, basis, tol, pass);
        else if (s.check == "projection")
            o.report["projection"] = projection_check(table, basis, tol, pass);
        else if (s.check == "technical")
            o.report["technical"] = technical_check(table, basis, s.seed, tol, pass);
        else
            throw UsageError("--check must be restriction, projection or technical");
        o.code = pass ? kPass : kVerdictFailure;
        return o;
    }

    OperatorTuple t = shift_tuple(basis);
    bool is_shift = true;
    if (!s.tuple.empty()) {
        t = load_tuple(s.tuple);
        is_shift = false;
    } else if (!s.ideal.empty()) {
        t = compress(t, ideal_embedding(s.ideal, basis));
        is_shift = false;
    }
    if (s.scale != 1.0)
        t = t.scaled(s.scale);

    const CoeffTable heredity = s.bergman_hereditary ? make_table(KernelSpec::bergman(s.d), N) : table;
    const HereditaryResult h = hereditary_1k(t, heredity, parse_order(s.order));
    o.report["hereditary"] = hereditary_json(h, tol);
    if (s.bergman_hereditary)
        o.report["hereditary"]["table"] = "bergman";

    o.report["defect_eigenvalues"] = to_vector(defect_operator(t).eigenvalues);
    if (is_shift) {
        nlohmann::json profile = nlohmann::json::array();
        for (const auto& e : shift_defect_profile(basis))
            profile.push_back({{"degree", e.degree}, {"eigenvalue", e.eigenvalue}, {"multiplicity", e.multiplicity}});
        o.report["defect_profile"] = profile;
        nlohmann::json tails = nlohmann::json::array();
        for (const auto& c : commutator_tail_norms(t, basis))
            tails.push_back({{"cutoff", c.cutoff}, {"with_boundary", c.with_boundary}, {"interior", c.interior}});
        o.report["commutator_tails"] = tails;
    }
    if (!s.toeplitz.empty()) {
        const KernelSpec other = named_spec(s.toeplitz, s.d);
        const ToeplitzDefect td = toeplitz_defect(table, make_table(other, N), s.d, N);
        o.report["toeplitz"] = {{"against", to_json(other, N)},
                                {"degree_factor", td.degree_factor},
                                {"degree_magnitude", td.degree_magnitude},
                                {"entry_residual", td.entry_residual}};
    }
    o.code = h.positive(tol) ? kPass : kVerdictFailure;
    return o;
}

Outcome cmd_dilate(const Settings& s)
{
    const int N = order_or(s, 4);
    const double tol = tol_or(s, 1e-8);
    const KernelSpec spec = spec_of(s);
    const CoeffTable table = make_table(spec, N);
    const MonomialBasis basis(table, s.d, N);

    CoextensionOptions opts;
    opts.tolerance = tol;
    std::string source;
    OperatorTuple t = OperatorTuple::zero(s.d, 1);
    if (s.zero) {
        source = "zero";
    } else if (!s.tuple.empty()) {
        t = load_tuple(s.tuple);
        source = "file";
    } else if (!s.ideal.empty()) {
        opts.ideal_embedding = ideal_embedding(s.ideal, basis);
        t = compress(shift_tuple(basis), *opts.ideal_embedding);
        source = "ideal";
    } else {
        const std::string fam = s.tuple_family.empty() ? s.family : s.tuple_family;
        const KernelSpec tspec = fam == s.family ? spec : named_spec(fam, s.d);
        t = shift_tuple(MonomialBasis(make_table(tspec, N), s.d, N));
        source = "shift:" + family_name(tspec.family);
    }
    if (s.scale != 1.0)
        t = t.scaled(s.scale);

    Outcome o;
    o.report = {{"operation", "dilate"},
                {"config",
                 {{"kernel", to_json(spec, N)},
                  {"tuple", source},
                  {"scale", s.scale},
                  {"tolerance", tol},
                  {"positivity_tolerance", opts.positivity_tol}}}};
    try {
        const DilationCertificate c = agler_coextension(t, table, basis, opts);
        o.report["certificate"] = to_json(c);
        o.code = c.valid() ? kPass : kVerdictFailure;
    } catch (const PreconditionError& e) {
        o.report["error"] = {{"kind", "precondition"}, {"message", e.what()}};
        o.code = kVerdictFailure;
    }
    return o;
}

// ---------------------------------------------------------------------------

namespace {

struct ReportRows {
    std::vector<std::array<std::string, 6>> rows;

    void add(const std::string& section, const std::string& family, int d, int N, const std::string& item,
             const std::string& value)
    {
        rows.push_back({section, family, std::to_string(d), std::to_string(N), item, value});
    }
    void add(const std::string& section, const std::string& family, int d, int N, const std::string& item, double v)
    {
        add(section, family, d, N, item, format_double(v));
    }
};

struct FamilyEntry {
    KernelSpec spec;
    std::string label;
};

std::vector<FamilyEntry> report_families(const Settings& s)
{
    std::vector<FamilyEntry> out;
    if (s.config.contains("families")) {
        for (const auto& f : s.config.at("families")) {
            KernelSpec spec = kernel_from_name(f.at("family").get<std::string>(), f.value("d", 1), f.value("s", 0.0),
                                               f.value("sigma", 1.0));
            spec.validate();
            out.push_back({spec, spec.name()});
        }
    } else if (!s.family.empty()) {
        const KernelSpec spec = spec_of(s);
        out.push_back({spec, spec.name()});
    }
    return out;
}

} // namespace

Outcome cmd_report(const Settings& s)
{
    const auto families = report_families(s);
    if (families.empty())
        throw UsageError("report needs a config with \"families\" or --family");
    const int N = order_or(s, s.config.value("N", 6));
    const double tol = tol_or(s, 1e-10);
    ReportRows r;
    r.add("config", "", 0, N, "tol", tol);
    r.add("config", "", 0, N, "cnp_tol", kDefaultCnpTol);
    r.add("config", "", 0, N, "certificate_tol", 1e-8);
    r.add("config", "", 0, N, "seed", std::to_string(s.seed));

    for (const auto& [spec, label] : families) {
        const int d = spec.d;
        const CoeffTable table = make_table(spec, N);
        for (int n = 0; n <= N; ++n)
            r.add("kernel", label, d, N, "a_" + std::to_string(n), table.a(n));
        for (int n = 1; n <= N; ++n)
            r.add("kernel", label, d, N, "b_" + std::to_string(n), table.b(n));
        const CnpVerdict cnp = is_cnp(table);
        r.add("kernel", label, d, N, "cnp", cnp.pass ? "pass" : "fail(n=" + std::to_string(cnp.first_negative_index) + ")");
        r.add("kernel", label, d, N, "recursion_residual", recursion_residual(table));

        const MonomialBasis basis(table, d, N);
        bool pass = false;
        const auto proj = projection_check(table, basis, tol, pass);
        r.add("model", label, d, N, "projection_distance", proj.at("distance_to_constants_projection").get<double>());
        r.add("model", label, d, N, "projection_verdict", pass ? "pass" : "fail");
        const auto rst = restriction_check(table, basis, tol, pass);
        r.add("model", label, d, N, "restriction_max_deviation", rst.at("max_deviation").get<double>());
        r.add("model", label, d, N, "restriction_verdict", pass ? "pass" : "fail");
        const auto tech = technical_check(table, basis, s.seed, tol, pass);
        r.add("model", label, d, N, "technical_max_residual", tech.at("max_residual").get<double>());
        for (const auto& e : shift_defect_profile(basis))
            r.add("model", label, d, N, "defect_eigenvalue_deg" + std::to_string(e.degree), e.eigenvalue);
        for (int n = 1; n <= N; ++n) {
            const MultiplierNormGap g = sampled_multiplier_power_norm(table, d, N, n);
            r.add("multiplier", label, d, N, "z1^" + std::to_string(n) + "_norm_sq", g.truncated_norm * g.truncated_norm);
            r.add("multiplier", label, d, N, "z1^" + std::to_string(n) + "_target_sq", g.target * g.target);
        }

        const OperatorTuple t = shift_tuple(basis).scaled(0.9);
        try {
            const DilationCertificate c = agler_coextension(t, table, basis);
            r.add("dilation", label, d, N, "isometry_residual", c.isometry_residual);
            r.add("dilation", label, d, N, "max_residual", c.max_residual());
            r.add("dilation", label, d, N, "certificate", c.valid() ? "valid" : "invalid");
        } catch (const PreconditionError&) {
            r.add("dilation", label, d, N, "certificate", "precondition_error");
        }
    }

    // Shared experiments, independent of the family list.
    {
        PickProblem p;
        p.d = 1;
        p.r = 1;
        p.nodes = {Point::Zero(1), Point::Constant(1, 0.5)};
        p.targets = {Matrix::Zero(1, 1), Matrix::Identity(1, 1)};
        r.add("pick", "hardy", 1, 200, "two_node_threshold",
              feasibility_threshold(p, KernelSpec::hardy(), 200, 1.0, 1e-9, tol));
        const auto pts = disc_sample(50, 0.9, s.seed);
        const auto q1 = kernel_quotient_gram(KernelSpec::bergman(), KernelSpec::hardy(), pts, 200, tol);
        r.add("pick", "bergman/hardy", 1, 200, "quotient_min_eigenvalue", q1.verdict.min_eigenvalue);
        r.add("pick", "bergman/hardy", 1, 200, "quotient_verdict", q1.verdict.psd ? "psd" : "not_psd");
        const auto q2 = kernel_quotient_gram(KernelSpec::hardy(), KernelSpec::bergman(), pts, 200, tol);
        r.add("pick", "hardy/bergman", 1, 200, "quotient_min_eigenvalue", q2.verdict.min_eigenvalue);
        r.add("pick", "hardy/bergman", 1, 200, "quotient_verdict", q2.verdict.psd ? "psd" : "not_psd");
        const ToeplitzDefect td =
            toeplitz_defect(make_table(KernelSpec::dirichlet(), N), make_table(KernelSpec::drury_arveson(1), N), 1, N);
        for (int n = 0; n < N; ++n)
            r.add("toeplitz", "dirichlet/da", 1, N, "magnitude_deg" + std::to_string(n),
                  td.degree_magnitude[static_cast<std::size_t>(n)]);
    }

    Outcome o;
    std::ostringstream csv;
    csv << "section,family,d,N,item,value\n";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            csv << (k ? "," : "") << csv_field(row[k]);
        csv << '\n';
        rows.push_back({{"section", row[0]}, {"family", row[1]}, {"d", row[2]}, {"N", row[3]}, {"item", row[4]},
                        {"value", row[5]}});
    }
    o.csv = csv.str();
    o.report = {{"operation", "report"}, {"rows", rows}};
    return o;
}

// ---------------------------------------------------------------------------

namespace {

using Applier = std::function<void(const nlohmann::json&)>;

template <class T>
void bind_option(CLI::App* app, std::vector<Applier>& appliers, const std::string& flags, const std::string& key, T& var,
          const std::string& help)
{
    CLI::Option* opt = app->add_option(flags, var, help);
    appliers.push_back([opt, key, &var](const nlohmann::json& cfg) {
        if (opt->count() == 0 && cfg.contains(key))
            var = cfg.at(key).get<T>();
    });
}

void bind_flag(CLI::App* app, std::vector<Applier>& appliers, const std::string& flags, const std::string& key,
               bool& var, const std::string& help)
{
    CLI::Option* opt = app->add_flag(flags, var, help);
    appliers.push_back([opt, key, &var](const nlohmann::json& cfg) {
        if (opt->count() == 0 && cfg.contains(key))
            var = cfg.at(key).get<bool>();
    });
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Unitarily invariant kernel spaces on the ball: coefficients, Pick matrices, model operators "
                 "and coextensions"};
    app.require_subcommand(1);
    Settings s;
    std::string config_path;
    std::map<CLI::App*, std::vector<Applier>> appliers;

    auto common = [&](CLI::App* sub) {
        auto& a = appliers[sub];
        bind_option(sub, a, "--family", "family", s.family, "kernel family");
        bind_option(sub, a, "--s", "s", s.s, "h_s exponent (s <= 0)");
        bind_option(sub, a, "--sigma", "sigma", s.sigma, "besov_sobolev parameter in (0,1]");
        bind_option(sub, a, "-d", "d", s.d, "number of variables");
        bind_option(sub, a, "-N", "N", s.N, "truncation order");
        bind_option(sub, a, "--tol", "tol", s.tol, "verdict tolerance");
        bind_option(sub, a, "--seed", "seed", s.seed, "random seed");
        bind_option(sub, a, "--out", "out", s.out, "output file (default stdout)");
        bind_option(sub, a, "--format", "format", s.format, "json or csv");
        sub->add_option("--config", config_path, "JSON config file; flags take precedence");
    };

    CLI::App* kernel = app.add_subcommand("kernel", "coefficients, CNP verdict, regularity and summability");
    common(kernel);

    CLI::App* pick = app.add_subcommand("pick", "Pick feasibility and kernel quotient tests");
    common(pick);
    bind_option(pick, appliers[pick], "--problem", "problem_file", s.problem, "Pick problem JSON file");
    bind_flag(pick, appliers[pick], "--sweep", "sweep", s.sweep, "bisect the target scaling threshold");
    bind_option(pick, appliers[pick], "--steps", "steps", s.steps, "sweep grid size");
    bind_option(pick, appliers[pick], "--numerator", "numerator", s.numerator, "quotient numerator family");
    bind_option(pick, appliers[pick], "--denominator", "denominator", s.denominator, "quotient denominator family");
    bind_option(pick, appliers[pick], "--points", "points", s.points, "quotient sample size");
    bind_option(pick, appliers[pick], "--radius", "radius", s.radius, "quotient sample radius");

    CLI::App* model = app.add_subcommand("model", "hereditary calculus and model-operator diagnostics");
    common(model);
    bind_option(model, appliers[model], "--check", "check", s.check, "restriction, projection or technical");
    bind_flag(model, appliers[model], "--bergman-hereditary", "bergman_hereditary", s.bergman_hereditary,
              "evaluate the hereditary calculus with the Bergman table");
    bind_option(model, appliers[model], "--toeplitz", "toeplitz", s.toeplitz, "family for the Toeplitz defect profile");
    bind_option(model, appliers[model], "--order", "order", s.order, "truncation order M or 'auto'");
    bind_option(model, appliers[model], "--tuple", "tuple", s.tuple, "matrix tuple file");
    bind_option(model, appliers[model], "--ideal", "ideal", s.ideal, "ideal JSON file; compresses the shift");
    bind_option(model, appliers[model], "--scale", "scale", s.scale, "scale factor applied to the tuple");

    CLI::App* dilate = app.add_subcommand("dilate", "coextension certificate");
    common(dilate);
    bind_option(dilate, appliers[dilate], "--tuple", "tuple", s.tuple, "matrix tuple file");
    bind_option(dilate, appliers[dilate], "--tuple-family", "tuple_family", s.tuple_family,
         "family whose truncated shift is dilated");
    bind_option(dilate, appliers[dilate], "--ideal", "ideal", s.ideal, "ideal JSON file; compresses the shift");
    bind_option(dilate, appliers[dilate], "--scale", "scale", s.scale, "scale factor applied to the tuple");
    bind_flag(dilate, appliers[dilate], "--zero", "zero", s.zero, "dilate the zero tuple on C");

    CLI::App* report = app.add_subcommand("report", "bundled acceptance computations as CSV");
    common(report);

    std::vector<std::string> argv_store{"rkhs"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!config_path.empty()) {
            s.config = read_json_file(config_path);
            if (!s.config.is_object())
                throw UsageError("config must be a JSON object");
            for (auto& apply : appliers[sub])
                apply(s.config);
        }
        if (sub == report && !s.config.contains("families") && !s.config.contains("family") &&
            sub->get_option("--family")->count() == 0)
            throw UsageError("report needs a config with \"families\" or --family");
        if (s.format != "json" && s.format != "csv")
            throw UsageError("--format must be json or csv");

        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        if (sub == kernel)
            o = cmd_kernel(s);
        else if (sub == pick)
            o = cmd_pick(s);
        else if (sub == model)
            o = cmd_model(s);
        else if (sub == dilate)
            o = cmd_dilate(s);
        else
            o = cmd_report(s);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::string text;
        if (s.format == "csv") {
            text = o.csv.empty() ? flatten_csv(o.report) : o.csv;
        } else {
            o.report["wall_clock_seconds"] = seconds;
            text = o.report.dump(2) + "\n";
        }
        if (s.out.empty()) {
            out << text;
        } else {
            std::ofstream f(s.out);
            if (!f)
                throw UsageError("cannot write " + s.out);
            f << text;
        }
        return o.code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << '\n';
        return kVerdictFailure;
    } catch (const CnpViolationError& e) {
        err << "CNP violation: " << e.what() << '\n';
        return kVerdictFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace rkhs::cli
