// spraylab <analyze|metrizable|involutivity|geodesics> [options]

#include "spraylab/report.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace spraylab;

namespace {

struct Common
{
    std::string input;
    std::string preset;
    RunOptions run;
    std::string format = "json";
    std::string out;
};

void add_common(CLI::App* cmd, Common& c)
{
    auto* in = cmd->add_option("--input", c.input, "JSON spray definition");
    auto* pr = cmd->add_option("--preset", c.preset, "named preset, e.g. flat2 or yang(lambda=0.5)");
    in->excludes(pr);
    cmd->add_option("--seed", c.run.seed, "sampling seed")->capture_default_str();
    cmd->add_option("--samples", c.run.samples, "sample count")->capture_default_str();
    cmd->add_option("--tol", c.run.tol, "zero tolerance")->capture_default_str();
    cmd->add_option("--format", c.format, "json or text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
    cmd->add_option("--out", c.out, "write the report here instead of stdout");
}

SprayDefinition load(const Common& c)
{
    if (!c.input.empty()) return definition_from_file(c.input);
    if (!c.preset.empty()) return definition_from_preset(c.preset);
    throw InputError("one of --input or --preset is required");
}

void write_file(const std::string& path, const std::string& body)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << body;
}

int emit(const Common& c, const CommandResult& r)
{
    const std::string body = c.format == "json" ? r.report.dump(2) + "\n" : to_text(r.report);
    if (c.out.empty())
        std::cout << body;
    else
        write_file(c.out, body);
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spray analysis: structure, metrizability, involutivity and geodesics"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    Common common;
    auto* analyze = app.add_subcommand("analyze", "connection, curvature, classification and identities");
    add_common(analyze, common);

    auto* metrizable = app.add_subcommand("metrizable", "projective metrizability by a candidate");
    add_common(metrizable, common);
    MetrizableOptions mopt;
    std::string finsler;
    std::vector<std::string> theta;
    auto* fo = metrizable->add_option("--finsler", finsler, "candidate F; theta = d_J F");
    auto* to = metrizable->add_option("--theta", theta, "candidate theta components")->delimiter(';');
    fo->excludes(to);

    auto* involutivity = app.add_subcommand("involutivity", "symbol kernels and the Cartan test");
    add_common(involutivity, common);
    int n_points = 10;
    involutivity->add_option("--n-points", n_points, "random points")->capture_default_str();

    auto* geodesics = app.add_subcommand("geodesics", "RK4 geodesics and projective comparison");
    add_common(geodesics, common);
    GeodesicOptions gopt;
    std::string compare, trace_prefix;
    geodesics->add_option("--x0", gopt.x0, "initial point")->delimiter(',');
    geodesics->add_option("--y0", gopt.y0, "initial velocity")->delimiter(',');
    geodesics->add_option("--T", gopt.T, "time horizon")->capture_default_str();
    geodesics->add_option("--steps", gopt.steps, "RK4 steps")->capture_default_str();
    geodesics->add_option("--compare", compare, "second spray: preset name or definition file");
    geodesics->add_option("--trace", trace_prefix, "write PREFIX.csv and PREFIX.json (and PREFIX.compare.*)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const SprayDefinition def = load(common);
        if (analyze->parsed()) return emit(common, cmd_analyze(def, common.run));
        if (metrizable->parsed()) {
            if (!finsler.empty()) mopt.finsler = finsler;
            if (!theta.empty()) mopt.theta = theta;
            return emit(common, cmd_metrizable(def, common.run, mopt));
        }
        if (involutivity->parsed()) return emit(common, cmd_involutivity(def, common.run, n_points));
        if (!compare.empty()) gopt.compare = definition_from_source(compare);
        const GeodesicResult r = cmd_geodesics(def, common.run, gopt);
        if (!trace_prefix.empty()) {
            write_file(trace_prefix + ".csv", to_csv(r.trace));
            write_file(trace_prefix + ".json", to_json(r.trace).dump() + "\n");
            if (r.compare_trace) {
                write_file(trace_prefix + ".compare.csv", to_csv(*r.compare_trace));
                write_file(trace_prefix + ".compare.json", to_json(*r.compare_trace).dump() + "\n");
            }
        }
        return emit(common, r);
    } catch (const InputError& e) {
        std::cerr << "spraylab: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "spraylab: " << e.what() << '\n';
        return 1;
    }
}
