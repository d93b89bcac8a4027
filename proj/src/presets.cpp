#include "spraylab/presets.hpp"

#include <charconv>
#include <map>
#include <stdexcept>

namespace spraylab {

namespace {

struct ParsedName
{
    std::string base;
    std::map<std::string, double> params;
};

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

ParsedName split_name(std::string_view name)
{
    ParsedName out;
    const auto open = name.find('(');
    out.base = trim(name.substr(0, open));
    if (open == std::string_view::npos) return out;
    if (name.back() != ')') throw std::invalid_argument("preset: missing ')' in '" + std::string(name) + "'");
    std::string_view inner = name.substr(open + 1, name.size() - open - 2);
    while (!inner.empty()) {
        const auto comma = inner.find(',');
        const std::string item = trim(inner.substr(0, comma));
        inner = comma == std::string_view::npos ? std::string_view{} : inner.substr(comma + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        std::string key = eq == std::string::npos ? "lambda" : trim(std::string_view(item).substr(0, eq));
        const std::string value = eq == std::string::npos ? item : trim(std::string_view(item).substr(eq + 1));
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size())
            throw std::invalid_argument("preset: bad value '" + value + "' for parameter '" + key + "'");
        out.params[key] = v;
    }
    return out;
}

int dimension_param(const ParsedName& p, int fallback)
{
    auto it = p.params.find("n");
    if (it == p.params.end()) return fallback;
    const int n = static_cast<int>(it->second);
    if (n != it->second || n < 1 || n > 8) throw std::invalid_argument("preset: n must be an integer in 1..8");
    return n;
}

void reject_unknown(const ParsedName& p, std::initializer_list<const char*> allowed)
{
    for (const auto& [k, v] : p.params) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw std::invalid_argument("preset '" + p.base + "': unknown parameter '" + k + "'");
    }
}

std::string format_number(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

Preset flat(int n)
{
    return {n == 2 || n == 3 ? "flat" + std::to_string(n) : "flat(n=" + std::to_string(n) + ")",
            "flat spray G = 0 over R^" + std::to_string(n), Spray(n, std::vector<Expression>(static_cast<std::size_t>(n))),
            euclidean_norm(n)};
}

} // namespace

Expression euclidean_norm(int n)
{
    std::vector<Expression> sq;
    for (int i = 1; i <= n; ++i) sq.push_back(pow(y(i), 2));
    return sqrt(sum(sq));
}

Preset preset(std::string_view name)
{
    const ParsedName p = split_name(name);
    if (p.base == "flat2" || p.base == "flat3") {
        reject_unknown(p, {});
        return flat(p.base == "flat2" ? 2 : 3);
    }
    if (p.base == "flat") {
        reject_unknown(p, {"n"});
        return flat(dimension_param(p, 2));
    }
    if (p.base == "anderson-thompson") {
        reject_unknown(p, {});
        return {"anderson-thompson", "G^1 = (y1^2+y2^2)/2, G^2 = 2*y1*y2",
                Spray::parse(2, {"(y1^2+y2^2)/2", "2*y1*y2"}), std::nullopt};
    }
    if (p.base == "yang") {
        reject_unknown(p, {"lambda", "n"});
        const int n = dimension_param(p, 2);
        const double lambda = p.params.count("lambda") ? p.params.at("lambda") : 0.5;
        const Expression norm = euclidean_norm(n);
        std::vector<Expression> G;
        for (int i = 1; i <= n; ++i) G.push_back(simplify(constant(lambda) * norm * y(i)));
        std::string canonical = "yang(lambda=" + format_number(lambda);
        if (n != 2) canonical += ",n=" + std::to_string(n);
        canonical += ")";
        return {canonical, "projective deformation G^i = lambda*|y|*y^i of the flat spray", Spray(n, std::move(G)),
                norm};
    }
    if (p.base == "riemannian") {
        reject_unknown(p, {});
        return {"riemannian",
                "geodesic spray of the metric (1+x2^2) dx1^2 + (1+x1^2) dx2^2",
                Spray::parse(2, {"(2*x2*y1*y2 - x1*y2^2)/(2*(1+x2^2))", "(2*x1*y1*y2 - x2*y1^2)/(2*(1+x1^2))"}),
                parse("sqrt((1+x2^2)*y1^2 + (1+x1^2)*y2^2)", 2)};
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names()
{
    return {"flat2", "flat3", "flat(n=4)", "anderson-thompson", "yang(lambda=0.5)", "riemannian"};
}

} // namespace spraylab
