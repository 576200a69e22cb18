#include "betactl/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>

#include "betactl/acceptance.hpp"
#include "betactl/io.hpp"
#include "betactl/metrics.hpp"

namespace betactl {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("write failed: " + path.string());
}

}  // namespace

std::filesystem::path resolve_out_dir(const RunConfig& cfg, const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("BETACTL_OUT"); env && *env) return env;
    return cfg.out_dir;
}

int cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
    try {
        const Scenario sc = cfg.scenario();
        const SimResult r = run_scenario(sc, cfg.mode, cfg.sim);

        std::filesystem::create_directories(out_dir);
        const std::string stem = "s" + std::to_string(sc.id) + "_" + std::string(to_string(cfg.mode));
        if (cfg.write_csv) {
            write_csv(r, out_dir / csv_file_name(sc.id, cfg.mode));
            out << "wrote " << (out_dir / csv_file_name(sc.id, cfg.mode)).string() << "\n";
        }

        if (cfg.write_metrics) {
            const TimeSpan span = final_span(r);
            std::vector<SpectrumReport> reports{spectrum_report(r, "x1", span), spectrum_report(r, "x2", span)};
            if (cfg.mode == LoopMode::closed) {
                const SimResult open = run_scenario(sc, LoopMode::open, cfg.sim);
                const double ratio = suppression_ratio(open, r, span);
                for (auto& rep : reports) rep.suppression_ratio = ratio;
            }
            write_text(out_dir / (stem + "_metrics.json"), metrics_json(reports));
            write_text(out_dir / (stem + "_metrics.txt"), metrics_text(reports));
            out << metrics_text(reports);
        }

        if (cfg.write_svg) {
            const auto open_csv = out_dir / csv_file_name(sc.id, LoopMode::open);
            const auto closed_csv = out_dir / csv_file_name(sc.id, LoopMode::closed);
            if (std::filesystem::exists(open_csv) && std::filesystem::exists(closed_csv)) {
                const auto svg = out_dir / ("s" + std::to_string(sc.id) + ".svg");
                SimResult o = read_csv(open_csv), c = read_csv(closed_csv);
                o.scenario_id = c.scenario_id = sc.id;
                c.mode = LoopMode::closed;
                write_text(svg, render_svg(o, c));
                out << "wrote " << svg.string() << "\n";
            }
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_plot(const std::filesystem::path& in_dir, std::ostream& out, std::ostream& err) {
    try {
        for (const auto& p : plot_directory(in_dir)) out << "wrote " << p.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        AcceptanceOptions opts;
        opts.config = cfg;
        const auto results = run_acceptance(opts, &out);
        return print_results(results, out) ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace betactl
