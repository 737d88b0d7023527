#include "fakeflow/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <thread>

#include "fakeflow/core.hpp"
#include "fakeflow/errors.hpp"
#include "fakeflow/flowio.hpp"
#include "fakeflow/flowviz.hpp"
#include "fakeflow/pipeline.hpp"

namespace fakeflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenOptions {
    std::string inputs;  // --images or --frames
    std::string depths;
    std::string out;
    std::uint64_t seed = 0;
    int jobs = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    bool flo = false;
    bool no_png = false;
    int variants = 1;
    bool shared_reverse = false;
    bool json = false;
};

struct VizOptions {
    std::string flo;
    std::string out;
};

struct InspectOptions {
    std::string depth;
    std::uint64_t seed = 0;
    bool shared_reverse = false;
    bool stages = false;
    std::string out;
    bool json = false;
};

void add_generation_flags(CLI::App* cmd, GenOptions& o, const char* inputs_flag, const char* inputs_help) {
    cmd->add_option(inputs_flag, o.inputs, inputs_help)->required();
    cmd->add_option("--depths", o.depths, "Directory of depth maps (16-bit grayscale PNG or PFM), matched by file stem")
        ->required();
    cmd->add_option("--out", o.out, "Output directory (flow_png/, flo/, manifest.json)")->required();
    cmd->add_option("--seed", o.seed, "Global seed; per-sample seeds derive from it and the sample id")
        ->capture_default_str();
    cmd->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    auto* flo = cmd->add_flag("--flo", o.flo, "Also write raw motion fields as Middlebury .flo");
    cmd->add_flag("--no-png", o.no_png, "Skip the RGB flow PNGs (requires --flo)")->needs(flo);
    cmd->add_option("--variants", o.variants, "Flows per image; ids get a _v<i> suffix when > 1")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--shared-reverse", o.shared_reverse, "Use one value-reverse draw for both axes");
    cmd->add_flag("--json", o.json, "Print the summary as JSON");
}

DatasetConfig to_config(const GenOptions& o) {
    DatasetConfig c;
    c.images_dir = o.inputs;
    c.depths_dir = o.depths;
    c.output_dir = o.out;
    c.global_seed = o.seed;
    c.emit_flo = o.flo;
    c.emit_png = !o.no_png;
    c.shared_reverse = o.shared_reverse;
    c.variants = o.variants;
    c.jobs = o.jobs;
    return c;
}

int report(const DatasetManifest& m, const GenOptions& o, std::ostream& out, std::ostream& err) {
    const std::size_t matched = m.records.size() / static_cast<std::size_t>(std::max(1, m.config.variants));
    for (const auto& r : m.records)
        if (!r.ok()) err << "failed: " << r.sample_id << ": " << r.error_kind << ": " << r.error << '\n';
    if (o.json) {
        json failures = json::array();
        for (const auto& r : m.records)
            if (!r.ok()) failures.push_back({{"sample_id", r.sample_id}, {"error_kind", r.error_kind}, {"error", r.error}});
        json summary = {{"matched", matched},
                        {"records", m.records.size()},
                        {"succeeded", m.succeeded()},
                        {"failed", m.failed()},
                        {"degenerate", m.degenerate()},
                        {"wall_seconds", m.run.wall_seconds},
                        {"manifest", (fs::path(o.out) / "manifest.json").generic_string()},
                        {"failures", std::move(failures)}};
        out << summary.dump(2) << '\n';
    } else {
        out << "matched: " << matched << '\n'
            << "succeeded: " << m.succeeded() << '\n'
            << "failed: " << m.failed() << '\n'
            << "degenerate: " << m.degenerate() << '\n'
            << "wall_time: " << std::fixed << std::setprecision(3) << m.run.wall_seconds << "s\n";
    }
    return m.failed() > 0 ? kPartial : kSuccess;
}

int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
    const DatasetConfig config = to_config(o);
    return report(run_dataset(config), o, out, err);
}

int cmd_video(const GenOptions& o, std::ostream& out, std::ostream& err) {
    const DatasetConfig config = to_config(o);
    return report(simulate_video_flows(config.images_dir, config.depths_dir, config), o, out, err);
}

int cmd_viz(const VizOptions& o, std::ostream& out) {
    const MotionField<float> field = read_flo(o.flo);
    const FlowImage img = render_flow(field);
    write_png_rgb(img, o.out);
    out << "wrote " << o.out << " (" << img.width << "x" << img.height << ")\n";
    return kSuccess;
}

struct ChannelStats {
    double min = 0, max = 0, mean = 0;
};

template <typename Derived>
ChannelStats stats_of(const Eigen::ArrayBase<Derived>& a) {
    const auto d = a.template cast<double>();
    return {d.minCoeff(), d.maxCoeff(), d.mean()};
}

json stage_json(const MotionField<float>& m) {
    auto ch = [](const ChannelStats& s) { return json{{"min", s.min}, {"max", s.max}, {"mean", s.mean}}; };
    return {{"u", ch(stats_of(m.u))}, {"v", ch(stats_of(m.v))}, {"max_norm", m.max_norm()}};
}

std::string stage_line(const char* name, const MotionField<float>& m) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6);
    auto ch = [&os](const char* label, const ChannelStats& s) {
        os << ' ' << label << "(min=" << s.min << " max=" << s.max << " mean=" << s.mean << ')';
    };
    os << name << ':';
    ch("u", stats_of(m.u));
    ch("v", stats_of(m.v));
    os << " max_norm=" << m.max_norm();
    return os.str();
}

int cmd_inspect(const InspectOptions& o, std::ostream& out) {
    const fs::path depth_path = o.depth;
    const RawDepthMap raw = read_depth(depth_path);
    const DepthMap depth = normalize_depth(raw);

    const std::string sample_id = depth_path.stem().string();
    const std::uint64_t seed = derive_sample_seed({o.seed, sample_id});
    const AugmentationParams p =
        sample_augmentation(seed, o.shared_reverse ? ReverseMode::Shared : ReverseMode::PerAxis);

    const MotionStages<float> stages = motion_stages(depth, p);
    const MotionField<float>& reversed = stages.reversed;
    const MotionField<float>& shifted = stages.shifted;
    const MotionField<float>& scaled = stages.scaled;
    const FlowImage flow = render_flow(scaled);

    std::vector<fs::path> written;
    if (o.stages) {
        const fs::path dir = o.out;
        fs::create_directories(dir);
        const int w = static_cast<int>(depth.width()), h = static_cast<int>(depth.height());
        auto put = [&](const char* name, const Bytes& bytes) {
            written.push_back(dir / name);
            write_file_bytes(written.back(), bytes);
        };
        put("1_depth.png", encode_png_gray8(w, h, depth_to_gray8(depth)));
        put("2_reversed.png", encode_png_rgb(motion_to_rg(reversed)));
        put("3_shifted.png", encode_png_rgb(motion_to_rg(shifted)));
        put("4_scaled.png", encode_png_rgb(motion_to_rg(scaled)));
        put("5_flow.png", encode_png_rgb(flow));
    }

    if (o.json) {
        auto axis = [](const AxisParams& a) {
            return json{{"delta", a.delta ? 1 : 0}, {"epsilon", a.epsilon}, {"eta", a.eta}};
        };
        json stages = json::array();
        for (const auto& f : written) stages.push_back(f.generic_string());
        json j = {{"depth",
                   {{"path", depth_path.generic_string()},
                    {"width", depth.width()},
                    {"height", depth.height()},
                    {"raw_min", raw.values.minCoeff()},
                    {"raw_max", raw.values.maxCoeff()},
                    {"degenerate", depth.degenerate}}},
                  {"seed", {{"global", o.seed}, {"sample_id", sample_id}, {"derived", format_checksum(seed)}}},
                  {"params", {{"x", axis(p.x)}, {"y", axis(p.y)}}},
                  {"reversed", stage_json(reversed)},
                  {"shifted", stage_json(shifted)},
                  {"scaled", stage_json(scaled)},
                  {"stage_images", std::move(stages)}};
        out << j.dump(2) << '\n';
        return kSuccess;
    }

    out << std::fixed << std::setprecision(6);
    out << "depth: " << depth_path.generic_string() << ' ' << depth.width() << 'x' << depth.height()
        << " raw_min=" << raw.values.minCoeff() << " raw_max=" << raw.values.maxCoeff()
        << " degenerate=" << (depth.degenerate ? 1 : 0) << '\n';
    out << "seed: global=" << o.seed << " sample_id=" << sample_id << " derived=" << format_checksum(seed)
        << '\n';
    auto axis = [&out](const char* name, const AxisParams& a) {
        out << ' ' << name << "(delta=" << (a.delta ? 1 : 0) << " epsilon=" << a.epsilon << " eta=" << a.eta
            << ')';
    };
    out << "params:";
    axis("x", p.x);
    axis("y", p.y);
    out << '\n';
    out << stage_line("reversed", reversed) << '\n'
        << stage_line("shifted", shifted) << '\n'
        << stage_line("scaled", scaled) << '\n';
    for (const auto& f : written) out << "stage: " << f.generic_string() << '\n';
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulated optical-flow dataset generator (depth map -> fake flow)", "fakeflow"};
    app.require_subcommand(1);

    GenOptions gen, video;
    VizOptions viz;
    InspectOptions inspect;

    auto* gen_cmd = app.add_subcommand("gen", "Generate fake flows for an image/depth dataset");
    add_generation_flags(gen_cmd, gen, "--images", "Directory of source images");

    auto* video_cmd = app.add_subcommand("video", "Generate a fake flow for every frame of extracted video sequences");
    add_generation_flags(video_cmd, video, "--frames",
                         "Directory of frame sequences (one sub-directory per sequence)");

    auto* viz_cmd = app.add_subcommand("viz", "Colorize a .flo motion field into an RGB PNG");
    viz_cmd->add_option("--flo", viz.flo, "Input .flo file")->required();
    viz_cmd->add_option("--out", viz.out, "Output PNG path")->required();

    auto* inspect_cmd = app.add_subcommand("inspect", "Print depth, parameter and per-stage motion statistics");
    inspect_cmd->add_option("--depth", inspect.depth, "Depth map (16-bit PNG or PFM)")->required();
    inspect_cmd->add_option("--seed", inspect.seed, "Global seed (sample id is the depth file stem)")
        ->capture_default_str();
    inspect_cmd->add_flag("--shared-reverse", inspect.shared_reverse, "Use one value-reverse draw for both axes");
    auto* stages_out = inspect_cmd->add_option("--out", inspect.out, "Directory for --stages images");
    inspect_cmd->add_flag("--stages", inspect.stages,
                          "Write the five stage images (depth, reversed, shifted, scaled, colorized)")
        ->needs(stages_out);
    inspect_cmd->add_flag("--json", inspect.json, "Print statistics as JSON");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help("", CLI::AppFormatMode::All) : subs.back()->help());
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.back()->help());
        return kError;
    }

    try {
        if (*gen_cmd) return cmd_gen(gen, out, err);
        if (*video_cmd) return cmd_video(video, out, err);
        if (*viz_cmd) return cmd_viz(viz, out);
        if (*inspect_cmd) return cmd_inspect(inspect, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}

}  // namespace fakeflow::cli
