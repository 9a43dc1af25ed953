// clicks2line: NoC evaluation, single-instance simulation, synthetic data and
// the annotation service.

#include "clicks2line/eval.hpp"
#include "clicks2line/io.hpp"
#include "clicks2line/rle.hpp"
#include "clicks2line/service.hpp"
#include "clicks2line/synth.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct PolicyFlags {
    std::string predictor = "geodesic";
    std::string strategy = "adaptive";
    int budget = 20;
    double q = 5.0;
    double k = -100.0;
    int crop = 64;
    double beta = 8.0;

    void add(CLI::App& app) {
        app.add_option("--predictor", predictor, "geodesic | external:CMD | http:URL")->capture_default_str();
        app.add_option("--strategy", strategy, "clicks | adaptive")->capture_default_str();
        app.add_option("--budget", budget, "click-equivalent budget")->capture_default_str();
        app.add_option("--q", q, "elongation threshold for lines")->capture_default_str();
        app.add_option("--k", k, "penalty weight of opposite-class pixels")->capture_default_str();
        app.add_option("--crop", crop, "line-generation crop side")->capture_default_str();
        app.add_option("--beta", beta, "geodesic predictor edge weight")->capture_default_str();
    }

    c2l::Policy policy() const {
        c2l::Policy p;
        p.budget = budget;
        p.q = q;
        p.k = k;
        p.candidates.crop = crop;
        return p;
    }
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::unique_ptr<c2l::Predictor> predictor_from(const PolicyFlags& f) {
    try {
        return c2l::make_predictor(f.predictor, {f.beta, true});
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

c2l::Policy validated_policy(const PolicyFlags& f, c2l::Strategy strategy) {
    try {
        auto p = c2l::apply_strategy(f.policy(), strategy);
        p.validate();
        return p;
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

c2l::Strategy strategy_from(const PolicyFlags& f) {
    try {
        return c2l::parse_strategy(f.strategy);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

int cmd_evaluate(const fs::path& dataset_dir, const std::string& name, std::vector<double> thresholds,
                 const fs::path& out, int threads, const PolicyFlags& flags) {
    const auto strategy = strategy_from(flags);
    const auto policy = validated_policy(flags, strategy);
    auto predictor = predictor_from(flags);
    if (!fs::is_directory(dataset_dir)) {
        std::cerr << "dataset not found: " << dataset_dir << "\n";
        return kExitIo;
    }
    const auto dataset = c2l::open_dataset(dataset_dir, name);
    if (dataset.entries.empty()) {
        std::cerr << "dataset " << dataset_dir << " has no image/mask pairs\n";
        return kExitIo;
    }
    c2l::Report report;
    try {
        report = c2l::run_dataset(dataset, *predictor, policy, strategy, thresholds, threads);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    c2l::write_report(report, out);
    const c2l::Report reports[] = {report};
    std::cout << c2l::render_table(reports);
    return 0;
}

int cmd_simulate(const fs::path& image_path, const fs::path& mask_path, const std::string& trace_path,
                 const std::string& debug_dir, const PolicyFlags& flags) {
    const auto strategy = strategy_from(flags);
    const auto policy = validated_policy(flags, strategy);
    auto predictor = predictor_from(flags);

    c2l::Session session;
    session.image = c2l::read_png(image_path);
    session.gt = c2l::read_label_mask(mask_path);
    if (session.gt->width() != session.image.width || session.gt->height() != session.image.height) {
        std::cerr << "image and mask sizes differ\n";
        return kExitIo;
    }
    if (!debug_dir.empty()) {
        fs::create_directories(debug_dir);
    }
    const auto candidates = c2l::cached_candidates(policy.candidates);
    const c2l::ProposalObserver observer = [&](int round, const c2l::Proposal& p) {
        if (!debug_dir.empty() && p.line) {
            c2l::write_line_debug_png(fs::path(debug_dir) / ("round_" + std::to_string(round) + "_line.png"),
                                      *p.line, *candidates);
        }
    };

    json rounds = json::array();
    while (true) {
        auto rec = c2l::step(session, policy, *predictor, observer);
        if (!rec) {
            break;
        }
        json r = c2l::to_json(*rec);
        r["mask_rle"] = c2l::rle_encode(session.masks.back());
        rounds.push_back(std::move(r));
    }
    const json trace = {
        {"image", image_path.string()},
        {"mask", mask_path.string()},
        {"width", session.image.width},
        {"height", session.image.height},
        {"strategy", c2l::to_string(strategy)},
        {"predictor", predictor->id()},
        {"budget", policy.budget},
        {"q", std::isinf(policy.q) ? json(nullptr) : json(policy.q)},
        {"k", policy.k},
        {"rounds", std::move(rounds)},
        {"total_cost", session.cumulative_cost},
        {"final_iou", c2l::iou(session.current_mask(), *session.gt)},
    };
    const std::string text = trace.dump(2) + "\n";
    if (trace_path.empty() || trace_path == "-") {
        std::cout << text;
    } else {
        c2l::write_text_file(trace_path, text);
    }
    return 0;
}

int cmd_synth(const fs::path& out, int count, const std::string& kinds, std::uint64_t seed, int size) {
    std::vector<c2l::ShapeKind> parsed;
    try {
        parsed = c2l::parse_kinds(kinds);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (count < 1) {
        throw UsageError("--count must be >= 1");
    }
    c2l::SynthParams params;
    params.size = size;
    const auto ids = c2l::gen_synthetic(out, seed, count, parsed, params);
    std::cout << "wrote " << ids.size() << " instances to " << out.string() << "\n";
    return 0;
}

c2l::HttpService* g_service = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& assets, const PolicyFlags& flags) {
    const auto strategy = strategy_from(flags);
    const auto policy = validated_policy(flags, strategy);
    std::shared_ptr<c2l::Predictor> predictor = predictor_from(flags);
    c2l::SessionStore store(predictor, policy);
    c2l::HttpService service(store, assets);
    g_service = &service;
    std::signal(SIGINT, [](int) {
        if (g_service != nullptr) {
            g_service->stop();
        }
    });
    spdlog::info("listening on {}:{}", host, port);
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    const bool ok = service.run(host, port);
    g_service = nullptr;
    if (!ok) {
        std::cerr << "cannot listen on " << host << ":" << port << "\n";
        return kExitIo;
    }
    return 0;
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("clicks2line");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("CLICKS2LINE_LOG")) {
        spdlog::set_level(spdlog::level::from_str(env));
    }
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Adaptive click/line interactive segmentation: simulation, NoC evaluation and annotation service"};
    app.require_subcommand(1);

    fs::path dataset;
    std::string dataset_name;
    std::vector<double> thresholds{0.85, 0.90, 0.95};
    fs::path out = "report.json";
    int threads = 1;
    PolicyFlags eval_flags;
    auto* evaluate = app.add_subcommand("evaluate", "NoC evaluation of a dataset");
    evaluate->add_option("--dataset", dataset, "dataset root with images/ and masks/")->required();
    evaluate->add_option("--name", dataset_name, "dataset name in the report (default: folder name)");
    evaluate->add_option("--thresholds", thresholds, "ascending IoU thresholds")->delimiter(',')->capture_default_str();
    evaluate->add_option("--out", out, "report JSON path; a .md table is written next to it")->capture_default_str();
    evaluate->add_option("--threads", threads, "instance-parallel workers")->capture_default_str();
    eval_flags.add(*evaluate);

    fs::path image;
    fs::path mask;
    std::string trace = "-";
    std::string debug_dir;
    PolicyFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "simulate one annotation session and write its trace");
    simulate->add_option("--image", image, "image PNG")->required();
    simulate->add_option("--mask", mask, "ground-truth mask PNG")->required();
    simulate->add_option("--trace", trace, "trace JSON path, - for stdout")->capture_default_str();
    simulate->add_option("--debug-dir", debug_dir, "write a line-generation PNG per line round");
    sim_flags.add(*simulate);

    fs::path synth_out;
    int count = 10;
    std::string kinds = "bars,blobs";
    std::uint64_t seed = 42;
    int size = c2l::SynthParams{}.size;
    auto* synth = app.add_subcommand("synth", "generate a synthetic bars/blobs dataset");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--count", count, "instances per kind")->capture_default_str();
    synth->add_option("--kinds", kinds, "comma-separated: bars, blobs")->capture_default_str();
    synth->add_option("--seed", seed)->capture_default_str();
    synth->add_option("--size", size, "image side")->capture_default_str();

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string assets;
    PolicyFlags serve_flags;
    auto* serve = app.add_subcommand("serve", "HTTP annotation service");
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--assets", assets, "static files for the web UI");
    serve_flags.add(*serve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*evaluate) {
            return cmd_evaluate(dataset, dataset_name, thresholds, out, threads, eval_flags);
        }
        if (*simulate) {
            return cmd_simulate(image, mask, trace, debug_dir, sim_flags);
        }
        if (*synth) {
            return cmd_synth(synth_out, count, kinds, seed, size);
        }
        if (*serve) {
            return cmd_serve(host, port, assets, serve_flags);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
