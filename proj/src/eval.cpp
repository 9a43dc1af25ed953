#include "clicks2line/eval.hpp"

#include "clicks2line/io.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace c2l {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Strategy s) { return s == Strategy::ClicksOnly ? "clicks-only" : "adaptive"; }

Strategy parse_strategy(std::string_view s) {
    if (s == "clicks" || s == "clicks-only") {
        return Strategy::ClicksOnly;
    }
    if (s == "adaptive") {
        return Strategy::Adaptive;
    }
    throw std::invalid_argument("unknown strategy '" + std::string(s) + "' (expected clicks or adaptive)");
}

Policy apply_strategy(Policy policy, Strategy strategy) {
    if (strategy == Strategy::ClicksOnly) {
        policy.q = std::numeric_limits<double>::infinity();
    }
    return policy;
}

namespace {

void check_thresholds(std::span<const double> thresholds) {
    if (thresholds.empty()) {
        throw std::invalid_argument("at least one IoU threshold is required");
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0 && thresholds[i] < 1.0)) {
            throw std::invalid_argument("IoU thresholds must lie in (0, 1)");
        }
        if (i > 0 && !(thresholds[i - 1] < thresholds[i])) {
            throw std::invalid_argument("IoU thresholds must be strictly ascending");
        }
    }
}

}  // namespace

InstanceResult run_instance(std::string id, const Image& image, const LabelMask& gt,
                            Predictor& predictor, const Policy& policy,
                            std::span<const double> thresholds) {
    check_thresholds(thresholds);
    policy.validate();

    InstanceResult result;
    result.id = std::move(id);
    for (const double t : thresholds) {
        result.noc.push_back({t, policy.budget, false});
    }

    Session session{image, gt, {}, {}, 0};
    try {
        while (true) {
            auto rec = step(session, policy, predictor);
            if (!rec) {
                break;
            }
            bool all = true;
            for (auto& t : result.noc) {
                if (!t.reached && rec->iou >= t.threshold) {
                    t.reached = true;
                    t.noc = rec->cumulative_cost;
                }
                all = all && t.reached;
            }
            result.trace.push_back(std::move(*rec));
            if (all) {
                break;
            }
        }
    } catch (const std::exception& e) {
        spdlog::warn("instance {} failed: {}", result.id, e.what());
        result.failed = true;
        result.error = e.what();
        for (auto& t : result.noc) {
            t.noc = policy.budget;
            t.reached = false;
        }
    }
    return result;
}

Dataset open_dataset(const fs::path& root, std::string name) {
    const fs::path images = root / "images";
    const fs::path masks = root / "masks";
    if (!fs::is_directory(images) || !fs::is_directory(masks)) {
        throw IoError("dataset " + root.string() + " needs images/ and masks/ folders");
    }
    Dataset ds;
    ds.name = name.empty() ? fs::absolute(root).lexically_normal().filename().string() : std::move(name);
    if (ds.name.empty()) {
        ds.name = fs::absolute(root).lexically_normal().parent_path().filename().string();
    }
    std::map<std::string, fs::path> mask_files;
    for (const auto& e : fs::directory_iterator(masks)) {
        if (e.is_regular_file() && e.path().extension() == ".png") {
            mask_files.emplace(e.path().stem().string(), e.path());
        }
    }
    std::map<std::string, fs::path> image_files;
    for (const auto& e : fs::directory_iterator(images)) {
        if (e.is_regular_file() && e.path().extension() == ".png") {
            image_files.emplace(e.path().stem().string(), e.path());
        }
    }
    for (const auto& [stem, path] : image_files) {
        auto it = mask_files.find(stem);
        if (it == mask_files.end()) {
            ds.warnings.push_back(stem + ": no mask, skipped");
            continue;
        }
        ds.entries.push_back({stem, path, it->second});
    }
    for (const auto& [stem, path] : mask_files) {
        if (!image_files.contains(stem)) {
            ds.warnings.push_back(stem + ": mask without image, skipped");
        }
    }
    return ds;
}

Report run_dataset(const Dataset& dataset, Predictor& predictor, const Policy& base_policy,
                   Strategy strategy, std::span<const double> thresholds, int threads) {
    check_thresholds(thresholds);
    const Policy policy = apply_strategy(base_policy, strategy);
    policy.validate();
    // Build the shared candidate set before workers start.
    cached_candidates(policy.candidates);

    const std::size_t n = dataset.entries.size();
    std::vector<std::optional<InstanceResult>> results(n);
    std::vector<std::string> load_errors(n);
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            const DatasetEntry& e = dataset.entries[i];
            Image image;
            LabelMask gt;
            try {
                image = read_png(e.image);
                gt = read_label_mask(e.mask);
                if (gt.width() != image.width || gt.height() != image.height) {
                    throw IoError("image is " + std::to_string(image.width) + "x" +
                                  std::to_string(image.height) + " but mask is " +
                                  std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
                }
            } catch (const std::exception& ex) {
                load_errors[i] = e.id + ": unreadable, skipped (" + ex.what() + ")";
                continue;
            }
            results[i] = run_instance(e.id, image, gt, predictor, policy, thresholds);
        }
    };
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back(worker);
        }
    }

    Report report;
    report.dataset = dataset.name;
    report.strategy = std::string(to_string(strategy));
    report.predictor = predictor.id();
    report.budget = policy.budget;
    report.q = policy.q;
    report.k = policy.k;
    report.crop = policy.candidates.crop;
    report.thresholds.assign(thresholds.begin(), thresholds.end());
    report.warnings = dataset.warnings;
    for (std::size_t i = 0; i < n; ++i) {
        if (!load_errors[i].empty()) {
            spdlog::warn("{}", load_errors[i]);
            report.warnings.push_back(load_errors[i]);
        }
        if (results[i]) {
            report.instances.push_back(std::move(*results[i]));
        }
    }

    report.mean_noc.assign(thresholds.size(), 0.0);
    report.unreached.assign(thresholds.size(), 0);
    for (const InstanceResult& r : report.instances) {
        report.failed += r.failed ? 1 : 0;
        for (std::size_t t = 0; t < thresholds.size(); ++t) {
            report.mean_noc[t] += r.noc[t].noc;
            report.unreached[t] += r.noc[t].reached ? 0 : 1;
        }
    }
    if (!report.instances.empty()) {
        for (double& m : report.mean_noc) {
            m /= static_cast<double>(report.instances.size());
        }
    }
    return report;
}

json to_json(const Annotation& a) {
    json points = json::array();
    for (const Point p : a.points) {
        points.push_back({{"x", p.x}, {"y", p.y}});
    }
    return {{"kind", to_string(a.kind)}, {"sign", to_string(a.sign)}, {"points", std::move(points)}};
}

Annotation annotation_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("sign") || !j.contains("points") ||
        !j["kind"].is_string() || !j["sign"].is_string() || !j["points"].is_array()) {
        throw std::invalid_argument("annotation needs string kind, string sign and a points array");
    }
    Annotation a;
    a.kind = parse_kind(j["kind"].get<std::string>());
    a.sign = parse_sign(j["sign"].get<std::string>());
    for (const auto& p : j["points"]) {
        if (!p.is_object() || !p.contains("x") || !p.contains("y") || !p["x"].is_number_integer() ||
            !p["y"].is_number_integer()) {
            throw std::invalid_argument("annotation points need integer x and y");
        }
        a.points.push_back({p["x"].get<int>(), p["y"].get<int>()});
    }
    return a;
}

json to_json(const StepRecord& r) {
    return {
        {"round", r.round},
        {"annotation", to_json(r.annotation)},
        {"requested", to_string(r.requested)},
        {"fallback", r.fallback},
        {"elongation", std::isinf(r.elongation) ? json(nullptr) : json(r.elongation)},
        {"cost", r.cost},
        {"cumulative_cost", r.cumulative_cost},
        {"iou", r.iou},
    };
}

namespace {

StepRecord step_from_json(const json& j) {
    StepRecord r;
    r.round = j.at("round").get<int>();
    r.annotation = annotation_from_json(j.at("annotation"));
    r.requested = parse_kind(j.at("requested").get<std::string>());
    r.fallback = j.at("fallback").get<std::string>();
    r.elongation = j.at("elongation").is_null() ? std::numeric_limits<double>::infinity()
                                                 : j.at("elongation").get<double>();
    r.cost = j.at("cost").get<int>();
    r.cumulative_cost = j.at("cumulative_cost").get<int>();
    r.iou = j.at("iou").get<double>();
    return r;
}

json to_json(const InstanceResult& r) {
    json noc = json::array();
    for (const auto& t : r.noc) {
        noc.push_back({{"threshold", t.threshold}, {"noc", t.noc}, {"reached", t.reached}});
    }
    json trace = json::array();
    for (const auto& s : r.trace) {
        trace.push_back(to_json(s));
    }
    return {{"id", r.id}, {"failed", r.failed}, {"error", r.error}, {"noc", std::move(noc)},
            {"trace", std::move(trace)}};
}

InstanceResult instance_from_json(const json& j) {
    InstanceResult r;
    r.id = j.at("id").get<std::string>();
    r.failed = j.at("failed").get<bool>();
    r.error = j.at("error").get<std::string>();
    for (const auto& t : j.at("noc")) {
        r.noc.push_back({t.at("threshold").get<double>(), t.at("noc").get<int>(), t.at("reached").get<bool>()});
    }
    for (const auto& s : j.at("trace")) {
        r.trace.push_back(step_from_json(s));
    }
    return r;
}

}  // namespace

json to_json(const Report& report) {
    json instances = json::array();
    for (const auto& r : report.instances) {
        instances.push_back(to_json(r));
    }
    return {
        {"dataset", report.dataset},
        {"strategy", report.strategy},
        {"predictor", report.predictor},
        {"budget", report.budget},
        {"q", std::isinf(report.q) ? json(nullptr) : json(report.q)},
        {"k", report.k},
        {"crop", report.crop},
        {"thresholds", report.thresholds},
        {"mean_noc", report.mean_noc},
        {"unreached", report.unreached},
        {"failed", report.failed},
        {"instances", std::move(instances)},
        {"warnings", report.warnings},
    };
}

Report report_from_json(const json& j) {
    Report r;
    r.dataset = j.at("dataset").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.predictor = j.at("predictor").get<std::string>();
    r.budget = j.at("budget").get<int>();
    r.q = j.at("q").is_null() ? std::numeric_limits<double>::infinity() : j.at("q").get<double>();
    r.k = j.at("k").get<double>();
    r.crop = j.at("crop").get<int>();
    r.thresholds = j.at("thresholds").get<std::vector<double>>();
    r.mean_noc = j.at("mean_noc").get<std::vector<double>>();
    r.unreached = j.at("unreached").get<std::vector<int>>();
    r.failed = j.at("failed").get<int>();
    for (const auto& i : j.at("instances")) {
        r.instances.push_back(instance_from_json(i));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

std::string report_to_text(const Report& report) { return to_json(report).dump(2) + "\n"; }

std::string render_table(std::span<const Report> reports) {
    if (reports.empty()) {
        throw std::invalid_argument("render_table: no reports");
    }
    // Column groups per dataset in first-seen order, rows per (strategy, predictor).
    std::vector<std::pair<std::string, std::vector<double>>> datasets;
    std::vector<std::pair<std::string, std::string>> rows;
    for (const Report& r : reports) {
        if (std::none_of(datasets.begin(), datasets.end(), [&](const auto& d) { return d.first == r.dataset; })) {
            datasets.emplace_back(r.dataset, r.thresholds);
        }
        const auto key = std::make_pair(r.strategy, r.predictor);
        if (std::find(rows.begin(), rows.end(), key) == rows.end()) {
            rows.push_back(key);
        }
    }
    const auto threshold_name = [](double t) {
        return "NoC" + std::to_string(static_cast<int>(std::lround(t * 100.0)));
    };

    std::ostringstream out;
    out << "| Strategy | Predictor |";
    for (const auto& [name, ts] : datasets) {
        for (const double t : ts) {
            out << ' ' << name << ' ' << threshold_name(t) << " |";
        }
    }
    out << "\n|---|---|";
    for (const auto& d : datasets) {
        for (std::size_t i = 0; i < d.second.size(); ++i) {
            out << "---:|";
        }
    }
    out << '\n';
    for (const auto& [strategy, predictor] : rows) {
        out << "| " << strategy << " | " << predictor << " |";
        for (const auto& [name, ts] : datasets) {
            const Report* match = nullptr;
            for (const Report& r : reports) {
                if (r.dataset == name && r.strategy == strategy && r.predictor == predictor) {
                    match = &r;
                }
            }
            for (std::size_t i = 0; i < ts.size(); ++i) {
                if (match != nullptr && i < match->mean_noc.size()) {
                    out << ' ' << std::fixed << std::setprecision(2) << match->mean_noc[i] << " |";
                } else {
                    out << " - |";
                }
            }
        }
        out << '\n';
    }
    return out.str();
}

void write_report(const Report& report, const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    write_text_file(path, report_to_text(report));
    fs::path md = path;
    md.replace_extension(".md");
    const Report reports[] = {report};
    write_text_file(md, render_table(reports));
}

}  // namespace c2l
