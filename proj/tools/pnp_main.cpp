#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pnp/metrics.hpp"
#include "pnp/render.hpp"
#include "pnp/scenario.hpp"
#include "pnp/trace.hpp"

namespace fs = std::filesystem;

namespace {

struct NRange {
    int lo = 0, hi = 0, step = 1;
};

NRange parse_n(const std::string& s) {
    NRange r;
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        r.lo = r.hi = std::stoi(s);
        return r;
    }
    r.lo = std::stoi(s.substr(0, dots));
    std::string rest = s.substr(dots + 2);
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
        r.step = std::stoi(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    r.hi = std::stoi(rest);
    if (r.step <= 0 || r.hi < r.lo) throw CLI::ValidationError("--n", "bad range: " + s);
    return r;
}

std::string default_outdir() {
    if (const char* env = std::getenv("PNP_OUT")) return env;
    return "out";
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
}

std::set<pnp::render::Layer> parse_layers(const std::vector<std::string>& names) {
    using pnp::render::Layer;
    std::set<Layer> out;
    for (const std::string& n : names) {
        if (n == "aoi") out.insert(Layer::AoiOutline);
        else if (n == "tiling") out.insert(Layer::HexTiling);
        else if (n == "sensors") out.insert(Layer::Sensors);
        else if (n == "disks") out.insert(Layer::SensingDisks);
        else if (n == "arrows") out.insert(Layer::MotionArrows);
        else throw CLI::ValidationError("--layers", "unknown layer: " + n);
    }
    return out;
}

int cmd_run(const std::string& config_path, const std::string& preset_name,
            const std::string& n_spec, std::uint64_t seed, int n_seeds,
            const std::string& outdir, bool allow_nonterm, double max_time,
            bool no_render) {
    pnp::scenario::ScenarioConfig base =
        !config_path.empty() ? pnp::scenario::load_config(config_path)
                             : pnp::scenario::preset(preset_name);
    for (const std::string& w : base.warnings) std::cerr << "warning: " << w << "\n";
    if (max_time > 0) base.max_time = max_time;
    NRange nr{base.n_sensors, base.n_sensors, 1};
    if (!n_spec.empty()) nr = parse_n(n_spec);

    fs::create_directories(outdir);
    std::ostringstream csv;
    csv << pnp::metrics::csv_header() << "\n";
    bool all_terminated = true;
    for (int n = nr.lo; n <= nr.hi; n += nr.step) {
        for (int si = 0; si < n_seeds; ++si) {
            pnp::scenario::ScenarioConfig cfg = base;
            cfg.n_sensors = n;
            const std::uint64_t s = seed + static_cast<std::uint64_t>(si);
            const pnp::trace::Trace tr = pnp::scenario::run_scenario(cfg, s);
            const pnp::metrics::RunReport rep = pnp::metrics::analyze(tr);
            std::ostringstream label;
            label << (preset_name.empty() ? "config" : preset_name) << "_n" << n << "_s" << s;
            pnp::trace::write_file(tr, (fs::path(outdir) / (label.str() + ".trace")).string());
            write_file(fs::path(outdir) / (label.str() + ".report.txt"),
                       pnp::metrics::report_text(rep));
            csv << pnp::metrics::csv_row(label.str(), s, rep) << "\n";
            if (!rep.quiesced) {
                all_terminated = false;
                std::cerr << label.str() << ": did not terminate before max_time\n";
            }
            if (!no_render) {
                pnp::render::RenderSpec spec;
                const double end = pnp::render::trace_end(tr);
                for (int k = 0; k < 4; ++k) {
                    const double t = end * k / 3.0;
                    std::ostringstream name;
                    name << label.str() << "_t" << k << ".svg";
                    write_file(fs::path(outdir) / name.str(),
                               pnp::render::render_svg(tr, t, spec));
                }
            }
        }
    }
    write_file(fs::path(outdir) / "aggregate.csv", csv.str());
    if (!all_terminated && !allow_nonterm) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"P&P hexagonal self-deployment simulator"};
    app.require_subcommand(1);

    // run
    std::string config_path, preset_name, n_spec;
    std::string outdir = default_outdir();
    std::uint64_t seed = 0;
    int n_seeds = 1;
    bool allow_nonterm = false, no_render = false;
    double max_time = -1;
    CLI::App* run = app.add_subcommand("run", "run one or more simulations");
    auto* cfg_opt = run->add_option("--config", config_path, "JSON scenario file");
    run->add_option("--preset", preset_name, "preset name (random80, boundary80, center80, narrows)")
        ->excludes(cfg_opt);
    run->add_option("--n", n_spec, "sensor count, single value or lo..hi:step");
    run->add_option("--seed", seed, "base seed (default 0)");
    run->add_option("--seeds", n_seeds, "number of consecutive seeds (default 1)");
    run->add_option("-o,--out", outdir, "output directory (default $PNP_OUT or ./out)");
    run->add_flag("--allow-nonterm", allow_nonterm, "exit 0 even if a run hit max_time");
    run->add_flag("--no-render", no_render, "skip SVG snapshots");
    run->add_option("--max-time", max_time, "override simulated max_time");

    // render
    std::string trace_path;
    std::vector<double> times;
    std::vector<std::string> layer_names;
    int canvas = 800;
    std::string render_out = default_outdir();
    CLI::App* rend = app.add_subcommand("render", "render SVG snapshots from a trace");
    rend->add_option("trace", trace_path, "trace file")->required();
    rend->add_option("--times", times, "instants to snapshot (default: 4 evenly spaced)");
    rend->add_option("--canvas", canvas, "canvas size in pixels");
    rend->add_option("--layers", layer_names, "layers: aoi tiling sensors disks arrows");
    rend->add_option("-o,--out", render_out, "output directory");

    // report
    std::string report_trace, report_out;
    CLI::App* rep = app.add_subcommand("report", "recompute metrics from a trace");
    rep->add_option("trace", report_trace, "trace file")->required();
    rep->add_option("-o,--out", report_out, "write report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (config_path.empty() && preset_name.empty())
                throw std::runtime_error("run: need --config or --preset");
            return cmd_run(config_path, preset_name, n_spec, seed, n_seeds, outdir,
                           allow_nonterm, max_time, no_render);
        }
        if (rend->parsed()) {
            const pnp::trace::Trace tr = pnp::trace::read_file(trace_path);
            pnp::render::RenderSpec spec;
            spec.canvas = canvas;
            if (!layer_names.empty()) spec.layers = parse_layers(layer_names);
            std::vector<double> ts = times;
            if (ts.empty()) {
                const double end = pnp::render::trace_end(tr);
                for (int k = 0; k < 4; ++k) ts.push_back(end * k / 3.0);
            }
            fs::create_directories(render_out);
            const std::string stem = fs::path(trace_path).stem().string();
            for (std::size_t i = 0; i < ts.size(); ++i) {
                std::ostringstream name;
                name << stem << "_r" << i << ".svg";
                write_file(fs::path(render_out) / name.str(),
                           pnp::render::render_svg(tr, ts[i], spec));
            }
            return 0;
        }
        if (rep->parsed()) {
            const pnp::trace::Trace tr = pnp::trace::read_file(report_trace);
            const std::string text =
                pnp::metrics::report_text(pnp::metrics::analyze(tr));
            if (report_out.empty())
                std::cout << text;
            else
                write_file(report_out, text);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
