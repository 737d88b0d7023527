#include "fakeflow/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <thread>

#include "fakeflow/core.hpp"
#include "fakeflow/errors.hpp"
#include "fakeflow/flowio.hpp"
#include "fakeflow/flowviz.hpp"

namespace fakeflow {

namespace fs = std::filesystem;
using nlohmann::json;

void DatasetConfig::validate() const {
    if (!emit_flo && !emit_png) throw ConfigError("nothing to emit: both PNG and .flo output are disabled");
    if (jobs < 1) throw ConfigError("jobs must be >= 1 (got " + std::to_string(jobs) + ")");
    if (variants < 1) throw ConfigError("variants must be >= 1 (got " + std::to_string(variants) + ")");
    if (output_dir.empty()) throw ConfigError("output directory is required");
}

std::size_t DatasetManifest::succeeded() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const SampleRecord& r) { return r.ok(); }));
}

std::size_t DatasetManifest::failed() const { return records.size() - succeeded(); }

std::size_t DatasetManifest::degenerate() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const SampleRecord& r) {
        return r.ok() && r.degenerate;
    }));
}

std::string format_checksum(std::uint64_t checksum) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(checksum));
    return buf;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_hidden(const fs::path& p) {
    const std::string name = p.filename().string();
    return !name.empty() && name[0] == '.';
}

// stem -> path for regular files accepted by `accept`
template <typename Accept>
std::map<std::string, fs::path> index_by_stem(const fs::path& dir, Accept accept, const char* side) {
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || is_hidden(entry.path()) || !accept(entry.path())) continue;
        const std::string stem = entry.path().stem().string();
        const auto [it, inserted] = out.emplace(stem, entry.path());
        if (!inserted) {
            throw ConfigError(std::string("duplicate ") + side + " stem '" + stem + "': " +
                              it->second.filename().string() + " and " +
                              entry.path().filename().string());
        }
    }
    return out;
}

void require_directory(const fs::path& dir, const char* what) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw ConfigError(std::string(what) + " directory '" + dir.string() + "' does not exist");
}

// Never throws on an empty intersection.
MatchResult collect_pairs(const fs::path& images_dir, const fs::path& depths_dir) {
    MatchResult result;
    const auto images = index_by_stem(images_dir, is_image_extension, "image");
    std::map<std::string, fs::path> depths;
    std::error_code ec;
    if (fs::is_directory(depths_dir, ec)) depths = index_by_stem(depths_dir, is_depth_extension, "depth");

    for (const auto& [stem, image] : images) {
        const auto it = depths.find(stem);
        if (it == depths.end())
            result.unmatched_images.push_back(image);
        else
            result.pairs.push_back({stem, image, it->second});
    }
    for (const auto& [stem, depth] : depths)
        if (!images.contains(stem)) result.unmatched_depths.push_back(depth);
    return result;
}

void warn_unmatched(const MatchResult& m) {
    static constexpr std::size_t kShown = 10;
    auto report = [](const std::vector<fs::path>& files, const char* what) {
        for (std::size_t i = 0; i < std::min(files.size(), kShown); ++i)
            warn(std::string(what) + " " + files[i].string());
        if (files.size() > kShown)
            warn("... and " + std::to_string(files.size() - kShown) + " more " + what + " files");
    };
    report(m.unmatched_images, "image without depth:");
    report(m.unmatched_depths, "depth without image:");
}

std::string utc_now_iso8601() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

struct Task {
    SamplePair pair;
    std::string sample_id;
};

std::vector<Task> expand_variants(const std::vector<SamplePair>& pairs, int variants) {
    std::vector<Task> tasks;
    tasks.reserve(pairs.size() * static_cast<std::size_t>(variants));
    for (const auto& p : pairs) {
        if (variants == 1) {
            tasks.push_back({p, p.sample_id});
            continue;
        }
        for (int v = 0; v < variants; ++v) tasks.push_back({p, p.sample_id + "_v" + std::to_string(v)});
    }
    return tasks;
}

DatasetManifest run_tasks(RunMode mode, const DatasetConfig& config, const MatchResult& matched) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<Task> tasks = expand_variants(matched.pairs, config.variants);

    ensure_directory(config.output_dir);
    if (config.emit_png) ensure_directory(config.output_dir / "flow_png");
    if (config.emit_flo) ensure_directory(config.output_dir / "flo");

    std::vector<SampleRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            const Task& t = tasks[i];
            records[i] = generate_sample(t.pair.image_path, t.pair.depth_path, t.sample_id, config);
        }
    };
    const auto workers = static_cast<std::size_t>(
        std::max<std::ptrdiff_t>(1, std::min<std::ptrdiff_t>(config.jobs, static_cast<std::ptrdiff_t>(tasks.size()))));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }

    DatasetManifest manifest;
    manifest.mode = mode;
    manifest.config = config;
    manifest.records = std::move(records);
    manifest.unmatched_images = matched.unmatched_images;
    manifest.unmatched_depths = matched.unmatched_depths;
    manifest.run.created_at = utc_now_iso8601();
    manifest.run.jobs = config.jobs;
    manifest.run.output_dir = config.output_dir;
    manifest.run.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_manifest(manifest, config.output_dir / "manifest.json");

    const std::size_t failed = manifest.failed();
    if (failed * 2 > manifest.records.size()) {
        std::map<std::string, std::size_t> classes;
        for (const auto& r : manifest.records)
            if (!r.ok()) ++classes[r.error_kind];
        std::string summary = std::to_string(failed) + " of " + std::to_string(manifest.records.size()) +
                              " samples failed:";
        for (const auto& [kind, count] : classes) summary += " " + kind + " x" + std::to_string(count);
        throw PipelineError(summary);
    }
    return manifest;
}

fs::path relative_output(const std::string& sample_id, const char* subdir, const char* ext) {
    return fs::path(subdir) / fs::path(sample_id + ext);
}

std::uint64_t emit(const Bytes& bytes, const fs::path& output_dir, const fs::path& rel, std::uint64_t hash) {
    const fs::path full = output_dir / rel;
    ensure_directory(full.parent_path());
    write_file_bytes(full, bytes);
    return fnv1a64(bytes, hash);
}

}  // namespace

bool is_image_extension(const fs::path& path) {
    static const std::array<const char*, 8> kExt{".jpg", ".jpeg", ".png", ".bmp", ".tif", ".tiff", ".webp", ".ppm"};
    const std::string ext = lower(path.extension().string());
    return std::any_of(kExt.begin(), kExt.end(), [&](const char* e) { return ext == e; });
}

MatchResult match_pairs(const fs::path& images_dir, const fs::path& depths_dir) {
    require_directory(images_dir, "images");
    require_directory(depths_dir, "depths");
    MatchResult result = collect_pairs(images_dir, depths_dir);
    if (result.pairs.empty()) {
        const std::size_t n_images = result.unmatched_images.size();
        const std::size_t n_depths = result.unmatched_depths.size();
        throw ConfigError("no image/depth pairs matched: " + std::to_string(n_images) + " images, " +
                          std::to_string(n_depths) + " depths, 0 matched");
    }
    warn_unmatched(result);
    return result;
}

SampleRecord generate_sample(const fs::path& image_path, const fs::path& depth_path,
                             const std::string& sample_id, const DatasetConfig& config) {
    SampleRecord rec;
    rec.sample_id = sample_id;
    rec.image_path = image_path;
    rec.depth_path = depth_path;
    try {
        rec.seed = derive_sample_seed({config.global_seed, sample_id});
        rec.params = sample_augmentation(
            rec.seed, config.shared_reverse ? ReverseMode::Shared : ReverseMode::PerAxis);

        const DepthMap depth = normalize_depth(read_depth(depth_path));
        const MotionField<float> motion = depth_to_motion(depth, rec.params);
        rec.degenerate = depth.degenerate || motion.max_norm() < kDegenerateNorm;

        std::uint64_t hash = fnv1a64(std::span<const std::uint8_t>{});
        if (config.emit_png) {
            const fs::path rel = relative_output(sample_id, "flow_png", ".png");
            hash = emit(encode_png_rgb(render_flow(motion)), config.output_dir, rel, hash);
            rec.flow_png_path = rel;
        }
        if (config.emit_flo) {
            const fs::path rel = relative_output(sample_id, "flo", ".flo");
            hash = emit(encode_flo(motion), config.output_dir, rel, hash);
            rec.flo_path = rel;
        }
        rec.checksum = hash;
    } catch (const Error& e) {
        rec.status = SampleStatus::Failed;
        rec.error_kind = e.kind();
        rec.error = e.what();
    } catch (const std::exception& e) {
        rec.status = SampleStatus::Failed;
        rec.error_kind = "Internal";
        rec.error = e.what();
    }
    if (!rec.ok()) {
        rec.flow_png_path.reset();
        rec.flo_path.reset();
        rec.checksum = 0;
    }
    return rec;
}

DatasetManifest run_dataset(const DatasetConfig& config) {
    config.validate();
    const MatchResult matched = match_pairs(config.images_dir, config.depths_dir);
    return run_tasks(RunMode::Dataset, config, matched);
}

DatasetManifest simulate_video_flows(const fs::path& frames_dir, const fs::path& depths_dir,
                                     const DatasetConfig& config) {
    config.validate();
    require_directory(frames_dir, "frames");
    require_directory(depths_dir, "depths");

    std::vector<fs::path> sequences;
    for (const auto& entry : fs::directory_iterator(frames_dir))
        if (entry.is_directory() && !is_hidden(entry.path())) sequences.push_back(entry.path());
    std::sort(sequences.begin(), sequences.end());

    MatchResult all;
    auto absorb = [&all](const std::string& sequence, MatchResult m) {
        for (auto& p : m.pairs) {
            p.sample_id = sequence + "/" + p.sample_id;
            all.pairs.push_back(std::move(p));
        }
        for (auto& f : m.unmatched_images) all.unmatched_images.push_back(std::move(f));
        for (auto& f : m.unmatched_depths) all.unmatched_depths.push_back(std::move(f));
    };

    std::size_t frame_count = 0;
    if (sequences.empty()) {
        fs::path dir = frames_dir.lexically_normal();
        if (dir.filename().empty()) dir = dir.parent_path();
        std::string name = dir.filename().string();
        if (name.empty() || name == ".") name = fs::absolute(frames_dir).lexically_normal().filename().string();
        MatchResult m = collect_pairs(frames_dir, depths_dir);
        frame_count = m.pairs.size() + m.unmatched_images.size();
        absorb(name, std::move(m));
    } else {
        for (const auto& seq : sequences) {
            MatchResult m = collect_pairs(seq, depths_dir / seq.filename());
            frame_count += m.pairs.size() + m.unmatched_images.size();
            absorb(seq.filename().string(), std::move(m));
        }
    }
    if (all.pairs.empty()) {
        throw ConfigError("no frame/depth pairs matched: " + std::to_string(frame_count) + " frames, " +
                          std::to_string(all.unmatched_depths.size()) + " depths, 0 matched");
    }
    std::sort(all.pairs.begin(), all.pairs.end(),
              [](const SamplePair& a, const SamplePair& b) { return a.sample_id < b.sample_id; });
    warn_unmatched(all);

    DatasetConfig cfg = config;
    cfg.images_dir = frames_dir;
    cfg.depths_dir = depths_dir;
    return run_tasks(RunMode::Video, cfg, all);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

json axis_json(const AxisParams& a) {
    return {{"delta", a.delta ? 1 : 0}, {"epsilon", a.epsilon}, {"eta", a.eta}};
}

AxisParams axis_from_json(const json& j) {
    AxisParams a;
    a.delta = j.at("delta").get<int>() != 0;
    a.epsilon = j.at("epsilon").get<double>();
    a.eta = j.at("eta").get<double>();
    return a;
}

json optional_path(const std::optional<fs::path>& p) {
    return p ? json(p->generic_string()) : json(nullptr);
}

std::optional<fs::path> optional_path_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return fs::path(j.get<std::string>());
}

json path_list(const std::vector<fs::path>& paths) {
    json arr = json::array();
    for (const auto& p : paths) arr.push_back(p.generic_string());
    return arr;
}

std::vector<fs::path> path_list_from(const json& j) {
    std::vector<fs::path> out;
    for (const auto& p : j) out.emplace_back(p.get<std::string>());
    return out;
}

}  // namespace

json to_json(const DatasetManifest& m) {
    json records = json::array();
    for (const auto& r : m.records) {
        json jr = {
            {"sample_id", r.sample_id},
            {"image_path", r.image_path.generic_string()},
            {"depth_path", r.depth_path.generic_string()},
            {"seed", r.seed},
            {"params", {{"x", axis_json(r.params.x)}, {"y", axis_json(r.params.y)}}},
            {"flow_png", optional_path(r.flow_png_path)},
            {"flo", optional_path(r.flo_path)},
            {"degenerate", r.degenerate},
            {"checksum", format_checksum(r.checksum)},
            {"status", r.ok() ? "ok" : "failed"},
        };
        if (!r.ok()) {
            jr["error_kind"] = r.error_kind;
            jr["error"] = r.error;
        }
        records.push_back(std::move(jr));
    }
    return {
        {"tool_version", m.tool_version},
        {"mode", m.mode == RunMode::Video ? "video" : "dataset"},
        {"config",
         {{"images_dir", m.config.images_dir.generic_string()},
          {"depths_dir", m.config.depths_dir.generic_string()},
          {"global_seed", m.config.global_seed},
          {"emit_png", m.config.emit_png},
          {"emit_flo", m.config.emit_flo},
          {"shared_reverse", m.config.shared_reverse},
          {"variants", m.config.variants}}},
        {"run",
         {{"created_at", m.run.created_at},
          {"jobs", m.run.jobs},
          {"output_dir", m.run.output_dir.generic_string()},
          {"wall_seconds", m.run.wall_seconds}}},
        {"summary",
         {{"records", m.records.size()},
          {"succeeded", m.succeeded()},
          {"failed", m.failed()},
          {"degenerate", m.degenerate()}}},
        {"unmatched_images", path_list(m.unmatched_images)},
        {"unmatched_depths", path_list(m.unmatched_depths)},
        {"records", std::move(records)},
    };
}

DatasetManifest manifest_from_json(const json& j) {
    DatasetManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.mode = j.at("mode").get<std::string>() == "video" ? RunMode::Video : RunMode::Dataset;
    const json& c = j.at("config");
    m.config.images_dir = c.at("images_dir").get<std::string>();
    m.config.depths_dir = c.at("depths_dir").get<std::string>();
    m.config.global_seed = c.at("global_seed").get<std::uint64_t>();
    m.config.emit_png = c.at("emit_png").get<bool>();
    m.config.emit_flo = c.at("emit_flo").get<bool>();
    m.config.shared_reverse = c.at("shared_reverse").get<bool>();
    m.config.variants = c.at("variants").get<int>();
    const json& run = j.at("run");
    m.run.created_at = run.at("created_at").get<std::string>();
    m.run.jobs = run.at("jobs").get<int>();
    m.run.output_dir = run.at("output_dir").get<std::string>();
    m.run.wall_seconds = run.at("wall_seconds").get<double>();
    m.config.jobs = m.run.jobs;
    m.config.output_dir = m.run.output_dir;
    m.unmatched_images = path_list_from(j.at("unmatched_images"));
    m.unmatched_depths = path_list_from(j.at("unmatched_depths"));
    for (const auto& jr : j.at("records")) {
        SampleRecord r;
        r.sample_id = jr.at("sample_id").get<std::string>();
        r.image_path = jr.at("image_path").get<std::string>();
        r.depth_path = jr.at("depth_path").get<std::string>();
        r.seed = jr.at("seed").get<std::uint64_t>();
        r.params.x = axis_from_json(jr.at("params").at("x"));
        r.params.y = axis_from_json(jr.at("params").at("y"));
        r.flow_png_path = optional_path_from(jr.at("flow_png"));
        r.flo_path = optional_path_from(jr.at("flo"));
        r.degenerate = jr.at("degenerate").get<bool>();
        r.checksum = std::stoull(jr.at("checksum").get<std::string>(), nullptr, 16);
        r.status = jr.at("status").get<std::string>() == "ok" ? SampleStatus::Ok : SampleStatus::Failed;
        r.error_kind = jr.value("error_kind", "");
        r.error = jr.value("error", "");
        m.records.push_back(std::move(r));
    }
    return m;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
    const std::string text = to_json(manifest).dump(2) + "\n";
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

DatasetManifest read_manifest(const fs::path& path) {
    const Bytes bytes = read_file_bytes(path);
    try {
        return manifest_from_json(json::parse(bytes.begin(), bytes.end()));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": invalid manifest: " + e.what());
    }
}

}  // namespace fakeflow
