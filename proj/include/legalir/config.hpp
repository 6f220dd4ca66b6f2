#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "legalir/pipelines.hpp"

namespace legalir::config {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Task { task1, task2, task3, task4_entail, task4_lawful, stats, sweep_k, eval };

Task parse_task(std::string_view name);  // "task1" ... "task4-entail", "sweep-k"
std::string_view task_name(Task task);

struct RunConfig {
    Task task = Task::stats;

    // Input paths; which ones a task requires is checked at execution time.
    std::string cases;        // case corpus, .jsonl or a plain-text directory
    std::string articles;     // statute corpus, .jsonl or plain-text code
    std::string questions;    // bar questions, .jsonl
    std::string queries;      // labeled retrieval queries, .jsonl
    std::string scorer;       // trained pair scorer; empty = train in-run from the corpus
    std::string scores;       // external (query, candidate) score table, .tsv
    std::string predictions;  // an earlier run's predictions.jsonl, for task=eval

    std::string output_dir = "out";
    pipelines::FusionConfig fusion;
    std::string aggregation = "max";  // or "mean_top_m"
    std::size_t mean_top_m = 3;
    std::size_t k = 150;              // statute filter depth
    std::vector<std::size_t> k_values = {10, 30, 50, 70, 100, 120, 150};
    double decision_threshold = 0.5;
    std::string eval_aggregation = "macro";  // or "micro"
    std::uint64_t seed = 0;
};

// Flat key=value lines; a line whose first non-blank character is '#' is a
// comment. Unknown keys are an error in strict mode, otherwise collected into
// *warnings. Values are range-checked.
RunConfig parse_config_text(std::string_view text, std::string_view origin, bool strict = true,
                            std::vector<std::string>* warnings = nullptr);
RunConfig load_config(const std::filesystem::path& path, bool strict = true,
                      std::vector<std::string>* warnings = nullptr);

// Every setting echoed as sorted key=value lines, defaults included; the
// manifest embeds this and the config hash is computed over it.
std::string canonical_config(const RunConfig& config);
std::string config_hash(const RunConfig& config);  // 16 hex digits

std::string file_fingerprint(const std::filesystem::path& path);  // 16 hex digits over bytes

// Write-to-temp-then-rename in the target directory; readers never observe a
// partial file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

// Runs the configured task; writes predictions/answers, report.json,
// report.md and manifest.json under output_dir. Returns the process exit
// status (0 on success). Errors escape as exceptions for the CLI to format.
int execute(const RunConfig& config);

}  // namespace legalir::config
