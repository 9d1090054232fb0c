#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "compgen/generate.hpp"
#include "compgen/term.hpp"

namespace compgen {

// Declarative description of one end-to-end run. Loaded from a JSON file;
// CLI flags override individual fields.
struct PipelineConfig {
    std::vector<std::filesystem::path> corpus;
    std::filesystem::path lexicon;
    std::filesystem::path workdir;
    std::uint64_t seed = 42;
    std::optional<std::size_t> sample_cap;

    std::size_t k_spaces = 1000;  // domain and function factor budget
    std::size_t k_mono = 1300;
    double svd_tol = 1e-10;

    GenConfig gen;

    std::size_t ratio_01 = 30;
    int degree = 3;
    double cost = 1.0;

    std::optional<std::filesystem::path> stems_file;           // comp targets
    std::optional<std::filesystem::path> decomp_targets_file;  // decomp targets
    std::size_t holistic_train = 0;
    std::size_t holistic_test = 0;

    static PipelineConfig from_json_file(const std::filesystem::path& path);
    void save_json(const std::filesystem::path& path) const;  // user-facing, with paths
    // Parameters plus input-file content signatures; no paths, so the hash
    // is stable across checkouts and output locations.
    std::string canonical_json() const;
    std::string config_hash() const;

    // Collects every violation instead of stopping at the first.
    std::vector<std::string> validate() const;

    // Workdir layout.
    std::filesystem::path stats_file() const { return workdir / "stats" / "stats.tsv"; }
    std::filesystem::path matrix_file(const std::string& name) const {
        return workdir / "matrices" / (name + ".tsv");
    }
    std::filesystem::path space_file(const std::string& name) const {
        return workdir / "spaces" / (name + ".tsv");
    }
    std::filesystem::path dataset_file(const std::string& name) const {
        return workdir / "datasets" / (name + ".tsv");
    }
    std::filesystem::path pool_dir(const std::string& stage, const std::string& name) const {
        return workdir / stage / name;
    }
    std::filesystem::path model_file(const std::string& name) const {
        return workdir / "models" / (name + ".model");
    }
    std::filesystem::path report_file(const std::string& name) const {
        return workdir / "reports" / (name + ".tsv");
    }
};

// Stages in execution order.
enum class Stage : std::uint8_t {
    ingest,
    cooccur,
    svd,
    dataset,
    generate,
    features,
    train,
    rerank,
    baseline,
    eval,
};

std::vector<Stage> all_stages();
const char* stage_name(Stage s);
Stage parse_stage(const std::string& s);

// Runs the requested stages in canonical order. Each stage checks its inputs
// and names the stage that produces anything missing. Stages are idempotent:
// rerunning one rewrites byte-identical artifacts.
void run_pipeline(const PipelineConfig& cfg, const std::vector<Stage>& stages);

// Writes a self-contained synthetic corpus, lexicon and target lists into
// workdir/input, then returns a config pointing at them. The corpus plants,
// for every group, a synonym whose domain row matches the modifier's and
// whose function row matches the head's, making it the unique top candidate.
PipelineConfig write_demo_input(const std::filesystem::path& workdir, std::uint64_t seed = 42);

// Demo: generate input, run every stage, and report where things landed.
struct DemoOutcome {
    PipelineConfig config;
    std::size_t planted_groups = 0;
    std::size_t planted_top1 = 0;  // groups whose synonym tops the Comp pool
};
DemoOutcome run_demo(const std::filesystem::path& workdir, std::uint64_t seed = 42);

}  // namespace compgen
