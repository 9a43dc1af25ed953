#pragma once

#include "clicks2line/interaction.hpp"
#include "clicks2line/predictor.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace c2l {

enum class Strategy { ClicksOnly, Adaptive };

std::string_view to_string(Strategy s);
/// Accepts "clicks", "clicks-only" and "adaptive".
Strategy parse_strategy(std::string_view s);

/// Clicks-only runs the same policy with q = +inf.
Policy apply_strategy(Policy policy, Strategy strategy);

struct ThresholdResult {
    double threshold = 0.0;
    int noc = 0;          // click-equivalents spent when IoU first reached the threshold
    bool reached = false; // false: noc is the budget

    friend bool operator==(const ThresholdResult&, const ThresholdResult&) = default;
};

struct InstanceResult {
    std::string id;
    std::vector<ThresholdResult> noc;  // ascending thresholds
    bool failed = false;
    std::string error;
    std::vector<StepRecord> trace;

    friend bool operator==(const InstanceResult&, const InstanceResult&) = default;
};

/// Runs the simulated annotator until every threshold is reached, the mask
/// is perfect, or the budget is spent. Predictor failures mark the instance
/// failed with NoC = budget everywhere.
InstanceResult run_instance(std::string id, const Image& image, const LabelMask& gt,
                            Predictor& predictor, const Policy& policy,
                            std::span<const double> thresholds);

/// <root>/images/<stem>.png paired with <root>/masks/<stem>.png.
struct DatasetEntry {
    std::string id;
    std::filesystem::path image;
    std::filesystem::path mask;
};

struct Dataset {
    std::string name;
    std::vector<DatasetEntry> entries;  // sorted by id
    std::vector<std::string> warnings;
};

/// Throws IoError when the root or its images/ and masks/ folders are missing.
Dataset open_dataset(const std::filesystem::path& root, std::string name = {});

struct Report {
    std::string dataset;
    std::string strategy;
    std::string predictor;
    int budget = 20;
    double q = 5.0;
    double k = -100.0;
    int crop = 64;
    std::vector<double> thresholds;
    std::vector<double> mean_noc;   // failures and unreached count at budget
    std::vector<int> unreached;     // per threshold
    int failed = 0;
    std::vector<InstanceResult> instances;
    std::vector<std::string> warnings;

    friend bool operator==(const Report&, const Report&) = default;
};

/// Evaluates every readable instance; unreadable ones are skipped with a
/// warning. Instances run on `threads` workers; the report does not depend on
/// scheduling.
Report run_dataset(const Dataset& dataset, Predictor& predictor, const Policy& policy,
                   Strategy strategy, std::span<const double> thresholds, int threads = 1);

nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string report_to_text(const Report& report);

/// One row per (strategy, predictor), NoC columns per dataset and threshold.
std::string render_table(std::span<const Report> reports);

/// Writes <path> (JSON) and <path> with a .md extension (markdown table).
void write_report(const Report& report, const std::filesystem::path& path);

nlohmann::json to_json(const StepRecord& rec);
nlohmann::json to_json(const Annotation& a);
Annotation annotation_from_json(const nlohmann::json& j);

}  // namespace c2l
