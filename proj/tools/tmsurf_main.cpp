// Command-line front end: load a surface spec, then classify singular points,
// scan domains, transform the data, or export meshes and reports.

#include <CLI11.hpp>

#include "tmsurf/app.hpp"

namespace {

bool parse_at(const std::string& s, double& u, double& v) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) return false;
    try {
        std::size_t p1 = 0, p2 = 0;
        const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
        u = std::stod(a, &p1);
        v = std::stod(b, &p2);
        return p1 == a.size() && p2 == b.size();
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"generalized timelike minimal surfaces: construction and "
                 "singularity classification"};
    cli.require_subcommand(1);

    std::string spec_path, at_str, out_path, csv_path, points_csv;
    bool no_transforms = false;

    auto* c_classify = cli.add_subcommand("classify", "classify one singular point");
    c_classify->add_option("spec", spec_path, "surface spec file")->required();
    c_classify->add_option("--at", at_str, "point as 'u,v'")->required();

    auto* c_scan = cli.add_subcommand("scan", "locate and classify all singular points in the domain");
    c_scan->add_option("spec", spec_path, "surface spec file")->required();
    c_scan->add_option("--out", out_path, "report JSON path ('-' for stdout)");
    c_scan->add_option("--csv", csv_path, "singular curve polylines CSV");
    c_scan->add_option("--points-csv", points_csv, "singular points CSV");
    c_scan->add_flag("--no-transforms", no_transforms, "skip conjugate/associate verdicts in the report");

    bool conj = false;
    double theta = 0.0;
    auto* c_transform = cli.add_subcommand("transform", "write the conjugate or an associated-family spec");
    c_transform->add_option("spec", spec_path, "surface spec file")->required();
    auto* flag_conj = c_transform->add_flag("--conjugate", conj, "conjugate surface");
    auto* opt_theta = c_transform->add_option("--associate", theta, "associated family parameter");
    flag_conj->excludes(opt_theta);
    c_transform->add_option("--out", out_path, "output spec path ('-' for stdout)");

    bool overlay = false;
    auto* c_mesh = cli.add_subcommand("mesh", "export a triangulated OBJ of the surface");
    c_mesh->add_option("spec", spec_path, "surface spec file")->required();
    c_mesh->add_option("--out", out_path, "OBJ path ('-' for stdout)");
    c_mesh->add_flag("--singular-overlay", overlay, "add singular-set polylines to the OBJ");

    std::string fixtures_dir;
    auto* c_fixtures = cli.add_subcommand("fixtures", "emit the built-in example specs");
    c_fixtures->add_option("--dir", fixtures_dir, "output directory (default: current)");

    std::uint64_t seed = 1;
    int count = 1000;
    auto* c_audit = cli.add_subcommand("audit", "random-surface sign audit and engine agreement");
    c_audit->add_option("--seed", seed, "RNG seed");
    c_audit->add_option("--count", count, "number of random surfaces");
    c_audit->add_option("--out", out_path, "summary JSON path ('-' for stdout)");

    CLI11_PARSE(cli, argc, argv);

    using namespace tmsurf;

    if (c_classify->parsed()) {
        double u = 0, v = 0;
        if (!parse_at(at_str, u, v)) {
            std::cerr << "error: --at expects 'u,v'\n";
            return 1;
        }
        return app::run_classify(spec_path, u, v, std::cout, std::cerr);
    }
    if (c_scan->parsed())
        return app::run_scan(spec_path, out_path, csv_path, points_csv, !no_transforms, std::cout,
                             std::cerr);
    if (c_transform->parsed())
        return app::run_transform(spec_path, conj,
                                  opt_theta->count() ? std::optional<double>(theta) : std::nullopt,
                                  out_path, std::cout, std::cerr);
    if (c_mesh->parsed()) return app::run_mesh(spec_path, out_path, overlay, std::cout, std::cerr);
    if (c_fixtures->parsed()) return app::run_fixtures(fixtures_dir, std::cout, std::cerr);
    if (c_audit->parsed()) return app::run_audit(seed, count, out_path, std::cout, std::cerr);
    return 1;
}
