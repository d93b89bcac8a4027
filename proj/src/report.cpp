#include "spraylab/report.hpp"

#include "spraylab/involutivity.hpp"
#include "spraylab/presets.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace spraylab {

using nlohmann::json;

namespace {

std::size_t u(int i) { return static_cast<std::size_t>(i); }

Expression parse_field(const std::string& text, int n, const std::string& field)
{
    try {
        return parse(text, n);
    } catch (const ParseError& e) {
        throw InputError(field + ": " + e.what());
    }
}

json header(const char* command, const SprayDefinition& def, const RunOptions& opt)
{
    return {{"tool", "spraylab"},
            {"version", kToolVersion},
            {"report_version", kReportVersion},
            {"command", command},
            {"input", {{"name", def.name}, {"dim", def.dim}, {"digest", def.digest}}},
            {"seed", opt.seed},
            {"samples", opt.samples},
            {"tolerances",
             {{"zero", opt.tol}, {"isotropy_relative", 1e-8}, {"positivity_margin", kPositivityMargin},
              {"rank_relative", 1e-9}}}};
}

std::vector<Point> samples_for(const SprayDefinition& def, const RunOptions& opt)
{
    if (opt.samples <= 0) throw InputError("--samples must be positive");
    return sample_points(def.dim, opt.samples, opt.seed);
}

json strings(const std::vector<Expression>& es)
{
    json a = json::array();
    for (const auto& e : es) a.push_back(to_string(e));
    return a;
}

json matrix_strings(const Matrix& m)
{
    json a = json::array();
    for (const auto& row : m) a.push_back(strings(row));
    return a;
}

json condition_json(const ConditionVerdict& v)
{
    json j{{"name", v.name}, {"status", to_string(v.status)}};
    if (v.zero) j["verdict"] = to_json(*v.zero);
    if (v.name == "i_S theta > 0") j["min_value"] = v.min_value;
    if (!v.ranks.empty()) j["ranks"] = v.ranks;
    if (v.witness && v.status != Status::pass) j["witness"] = to_json(*v.witness);
    if (!v.detail.empty()) j["detail"] = v.detail;
    return j;
}

json basis_json(const CartanBasisResult& b)
{
    return {{"dims", b.dims}, {"sum", b.sum}, {"equality", b.equality}};
}

json trace_summary(const Spray& S, const GeodesicTrace& tr)
{
    json j{{"nodes", tr.size()},
           {"step", tr.step},
           {"method", tr.method},
           {"halted", tr.halted},
           {"final", {{"t", tr.t.back()}, {"x", tr.x.back()}, {"y", tr.y.back()}}},
           {"arclength", arclength(tr).back()}};
    if (tr.halted) {
        j["halt_time"] = tr.halt_time;
        j["halt_reason"] = tr.halt_reason;
    }
    if (tr.size() >= 5) j["ode_residual"] = ode_residual(S, tr);
    return j;
}

std::vector<double> initial(const std::vector<double>& given, int n, bool unit, const char* flag)
{
    if (given.empty()) {
        std::vector<double> v(u(n), 0.0);
        if (unit) v[0] = 1.0;
        return v;
    }
    if (static_cast<int>(given.size()) != n)
        throw InputError(std::string(flag) + " needs " + std::to_string(n) + " components");
    return given;
}

void render(std::ostringstream& os, const json& j, int indent)
{
    const std::string pad(u(indent), ' ');
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& v = it.value();
        const std::string key = j.is_object() ? it.key() : "-";
        if (v.is_object() || (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array()))) {
            os << pad << key << ":\n";
            render(os, v, indent + 2);
        } else {
            os << pad << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        }
    }
}

} // namespace

std::string fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

SprayDefinition definition_from_json(const json& j)
{
    if (!j.is_object()) throw InputError("definition must be a JSON object");
    SprayDefinition d;
    try {
        d.dim = j.at("dim").get<int>();
        d.G = j.at("G").get<std::vector<std::string>>();
        if (j.contains("F")) d.F = j.at("F").get<std::string>();
        if (j.contains("theta")) d.theta = j.at("theta").get<std::vector<std::string>>();
        d.name = j.value("name", std::string("input"));
        d.description = j.value("description", std::string());
    } catch (const json::exception& e) {
        throw InputError(std::string("definition: ") + e.what());
    }
    if (d.dim < 1) throw InputError("definition: dim must be positive");
    if (static_cast<int>(d.G.size()) != d.dim) throw InputError("definition: G needs dim entries");
    if (d.theta && static_cast<int>(d.theta->size()) != d.dim) throw InputError("definition: theta needs dim entries");

    std::vector<Expression> G;
    for (std::size_t i = 0; i < d.G.size(); ++i) G.push_back(parse_field(d.G[i], d.dim, "G[" + std::to_string(i) + "]"));
    d.spray = Spray(d.dim, std::move(G));
    if (d.F) d.finsler = parse_field(*d.F, d.dim, "F");
    if (d.theta)
        for (std::size_t i = 0; i < d.theta->size(); ++i) parse_field((*d.theta)[i], d.dim, "theta[" + std::to_string(i) + "]");

    json canonical{{"dim", d.dim}, {"G", d.G}};
    if (d.F) canonical["F"] = *d.F;
    if (d.theta) canonical["theta"] = *d.theta;
    d.digest = "fnv1a64:" + fnv1a64(canonical.dump());
    return d;
}

SprayDefinition definition_from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "': " + e.what());
    }
    return definition_from_json(j);
}

SprayDefinition definition_from_preset(const std::string& name)
{
    Preset p;
    try {
        p = preset(name);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    SprayDefinition d;
    d.name = p.name;
    d.description = p.description;
    d.dim = p.spray.n;
    for (const auto& g : p.spray.G) d.G.push_back(to_string(g));
    if (p.finsler) d.F = to_string(*p.finsler);
    d.spray = p.spray;
    d.finsler = p.finsler;
    d.digest = "fnv1a64:" + fnv1a64("preset:" + p.name);
    return d;
}

SprayDefinition definition_from_source(const std::string& source)
{
    std::error_code ec;
    if (std::filesystem::is_regular_file(source, ec)) return definition_from_file(source);
    return definition_from_preset(source);
}

json to_json(const Point& p) { return {{"x", p.x}, {"y", p.y}}; }

json to_json(const ZeroVerdict& v)
{
    json j{{"level", to_string(v.level)}, {"max_residual", v.max_residual}, {"evaluated", v.evaluated},
           {"skipped", v.skipped}};
    if (v.level == ZeroLevel::nonzero && v.witness) {
        j["witness"] = to_json(*v.witness);
        j["witness_value"] = v.witness_value;
    }
    return j;
}

json to_json(const GeodesicTrace& tr)
{
    return {{"n", tr.n}, {"step", tr.step}, {"method", tr.method}, {"t", tr.t}, {"x", tr.x}, {"y", tr.y},
            {"halted", tr.halted}, {"halt_time", tr.halt_time}, {"halt_reason", tr.halt_reason}};
}

CommandResult cmd_analyze(const SprayDefinition& def, const RunOptions& opt)
{
    const auto samples = samples_for(def, opt);
    const Spray& S = def.spray;
    json r = header("analyze", def, opt);
    bool ok = true;

    json validation = json::array();
    for (const auto& v : validate(S, samples, opt.tol)) {
        ok = ok && v.is_zero();
        validation.push_back(to_json(v));
    }
    r["validation"] = {{"homogeneity", validation}};
    if (!ok) {
        r["passed"] = false;
        return {r, 2};
    }

    const Connection c = connection(S);
    r["connection"] = {{"N", matrix_strings(c.N)}};

    const Classification cls = classify(S, samples, 1e-8, opt.tol);
    json cj{{"kind", to_string(cls.kind)},
            {"degenerate", cls.degenerate},
            {"curvature", to_json(cls.curvature_verdict)},
            {"max_relative_residual", cls.max_relative_residual}};
    if (cls.kind == SprayClass::isotropic) {
        cj["lambda"] = to_string(cls.lambda);
        cj["eta"] = strings(cls.eta);
    }
    r["classification"] = cj;

    json ids = json::array();
    for (const auto& check : identity_suite(S, samples, opt.tol)) {
        ok = ok && check.verdict.is_zero();
        json j = to_json(check.verdict);
        j["name"] = check.name;
        ids.push_back(j);
    }
    r["identities"] = ids;
    r["passed"] = ok;
    return {r, ok ? 0 : 2};
}

CommandResult cmd_metrizable(const SprayDefinition& def, const RunOptions& opt, const MetrizableOptions& m)
{
    const auto samples = samples_for(def, opt);
    const int n = def.dim;
    json r = header("metrizable", def, opt);

    std::optional<std::string> F = m.finsler;
    std::optional<std::vector<std::string>> theta = m.theta;
    if (!F && !theta) {
        F = def.F;
        theta = def.theta;
    }
    if (!F && !theta) throw InputError("metrizable: no candidate; pass --finsler or --theta");

    SemiBasicOneForm form;
    json candidate;
    if (F) {
        const Expression f = parse_field(*F, n, "finsler");
        try {
            form = euler_poincare(f, n, samples, opt.tol);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
        candidate = {{"kind", "finsler"}, {"F", *F}, {"theta", strings(form.theta)}};
    } else {
        if (static_cast<int>(theta->size()) != n) throw InputError("theta needs " + std::to_string(n) + " components");
        std::vector<Expression> comps;
        for (std::size_t i = 0; i < theta->size(); ++i) comps.push_back(parse_field((*theta)[i], n, "theta"));
        form = SemiBasicOneForm(n, comps);
        candidate = {{"kind", "theta"}, {"theta", *theta}};
    }
    r["candidate"] = candidate;

    const ConditionReport rep = check_conditions(def.spray, form, samples, opt.tol);
    json conds = json::array();
    for (const auto& v : rep.verdicts) conds.push_back(condition_json(v));
    r["conditions"] = conds;
    r["rank_equivalence"] = rep.rank_equivalence;
    const Obstruction& ob = rep.obstruction_detail;
    r["obstruction"] = {{"generic", to_json(ob.generic)}, {"cyclic", to_json(ob.cyclic)}, {"agree", ob.agree()}};

    const bool ok = rep.passed();
    if (ok) {
        const RecoveredFinsler rec = recover_finsler(def.spray, form, samples, opt.tol);
        r["recovered"] = {{"F", to_string(rec.F)},
                          {"P", to_string(rec.P)},
                          {"deformation", to_string(rec.deformation)},
                          {"G_F", strings(rec.S_F.G)},
                          {"p_homogeneity", to_json(rec.p_homogeneity)},
                          {"geodesic", to_json(rec.geodesic)}};
    }
    r["passed"] = ok;
    return {r, ok ? 0 : 2};
}

CommandResult cmd_involutivity(const SprayDefinition& def, const RunOptions& opt, int n_points)
{
    if (n_points <= 0) throw InputError("--n-points must be positive");
    json r = header("involutivity", def, opt);
    r["n_points"] = n_points;
    if (def.dim > kInvolutivityDimensionCap)
        r["warning"] = "dimension " + std::to_string(def.dim) + " exceeds " +
                       std::to_string(kInvolutivityDimensionCap) + "; symbol matrices are large";
    bool counts = true, cartan = true, indeterminate = false;
    json points = json::array();
    for (const auto& p : sample_points(def.dim, n_points, opt.seed)) {
        const DimensionReport d = cartan_test(def.spray, p);
        counts = counts && d.matches_expected();
        cartan = cartan && d.quasi_regular.equality;
        indeterminate = indeterminate || d.indeterminate;
        points.push_back({{"point", to_json(p)},
                          {"dim_g1", d.dim_g1},
                          {"dim_g2", d.dim_g2},
                          {"quasi_regular", basis_json(d.quasi_regular)},
                          {"unshifted", basis_json(d.unshifted)},
                          {"indeterminate", d.indeterminate},
                          {"min_retained_ratio", d.min_retained_ratio},
                          {"max_discarded_ratio", d.max_discarded_ratio}});
    }
    const int n = def.dim;
    std::vector<int> dims;
    for (int j = 1; j <= n; ++j) dims.push_back(n * (n - j));
    r["expected"] = {{"dim_g1", n * n}, {"dim_g2", n * n * (n + 1) / 2}, {"dims", dims}};
    r["points"] = points;
    r["summary"] = {{"counts_match", counts}, {"cartan_equality", cartan}, {"ill_conditioned", indeterminate}};
    const bool ok = counts && cartan && !indeterminate;
    r["passed"] = ok;
    return {r, ok ? 0 : 2};
}

GeodesicResult cmd_geodesics(const SprayDefinition& def, const RunOptions& opt, const GeodesicOptions& g)
{
    const int n = def.dim;
    const std::vector<double> x0 = initial(g.x0, n, false, "--x0");
    const std::vector<double> y0 = initial(g.y0, n, true, "--y0");
    if (!(g.T > 0.0) || g.steps <= 0) throw InputError("--T and --steps must be positive");
    json r = header("geodesics", def, opt);
    r["initial"] = {{"x0", x0}, {"y0", y0}, {"T", g.T}, {"steps", g.steps}};

    GeodesicResult out;
    try {
        out.trace = integrate(def.spray, x0, y0, g.T, g.steps);
    } catch (const FiberCollapse& e) {
        throw InputError(e.what());
    }
    r["trace"] = trace_summary(def.spray, out.trace);
    bool ok = !out.trace.halted;

    if (g.compare) {
        const SprayDefinition& other = *g.compare;
        if (other.dim != n) throw InputError("--compare: dimension mismatch");
        out.compare_trace = integrate(other.spray, x0, y0, g.T, g.steps);
        EquivalenceReport eq = projective_factor(def.spray, other.spray, samples_for(def, opt), opt.tol);
        json ej{{"against", {{"name", other.name}, {"digest", other.digest}}},
                {"parallel", eq.parallel},
                {"max_parallel_residual", eq.max_parallel_residual},
                {"homogeneous", eq.homogeneous},
                {"max_homogeneity_residual", eq.max_homogeneity_residual}};
        if (eq.witness) {
            ej["witness"] = to_json(*eq.witness);
            ej["witness_D"] = eq.witness_D;
        }
        if (eq.parallel) {
            json ps = json::array();
            double lo = INFINITY, hi = -INFINITY;
            for (const auto& s : eq.samples) {
                ps.push_back({{"point", to_json(s.point)}, {"P", s.P}});
                const double ratio = s.P / s.point.fiber_norm();
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            ej["P_samples"] = ps;
            ej["P_over_norm_y"] = {{"min", lo}, {"max", hi}};
        }
        r["compare_trace"] = trace_summary(other.spray, *out.compare_trace);
        if (!out.trace.halted && !out.compare_trace->halted) {
            eq.trace_distance = trace_compare(out.trace, *out.compare_trace);
            ej["trace_distance"] = *eq.trace_distance;
            ej["trace_tolerance"] = eq.trace_tolerance;
        }
        ej["passed"] = eq.passed();
        r["equivalence"] = ej;
        ok = ok && !out.compare_trace->halted && eq.passed();
    }
    r["passed"] = ok;
    out.report = r;
    out.exit_code = ok ? 0 : 2;
    return out;
}

std::string to_text(const json& report)
{
    std::ostringstream os;
    render(os, report, 0);
    return os.str();
}

} // namespace spraylab
