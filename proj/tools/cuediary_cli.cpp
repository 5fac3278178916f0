// cuediary: run the diary service, export a study, or compute the evaluation
// tables from exported data.

#include "cuediary/config.hpp"
#include "cuediary/error.hpp"
#include "cuediary/evaluation.hpp"
#include "cuediary/http_api.hpp"
#include "cuediary/media.hpp"
#include "cuediary/service.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cuediary;
namespace fs = std::filesystem;

namespace {

std::vector<json> read_jsonl(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, fmt::format("cannot open {}", path.string()));
    std::vector<json> rows;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::InvalidArgument, fmt::format("{}:{}: invalid JSON", path.string(), n));
        rows.push_back(std::move(j));
    }
    return rows;
}

std::vector<Memo> submitted_memos(const fs::path& path) {
    std::vector<Memo> out;
    for (const auto& j : read_jsonl(path)) {
        auto m = memo_from_json(j);
        if (m.state == MemoState::Submitted) out.push_back(std::move(m));
    }
    return out;
}

std::vector<RecallScoreSheet> load_sheets(const fs::path& path) {
    if (path.extension() == ".csv") {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::InvalidArgument, fmt::format("cannot open {}", path.string()));
        std::stringstream ss;
        ss << in.rdbuf();
        return eval::score_sheets_from_csv(ss.str());
    }
    std::vector<RecallScoreSheet> out;
    for (const auto& j : read_jsonl(path)) out.push_back(eval::score_sheet_from_json(j));
    return out;
}

std::vector<double> parse_numbers(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("'{}' is not a number", item));
        }
    }
    return out;
}

std::string f2(double x) {
    return fmt::format("{:.2f}", eval::round_half_up(x, 2));
}

std::string p3(double p) {
    return p < 0.001 ? "<.001" : fmt::format("{:.3f}", eval::round_half_up(p, 3));
}

std::string mean_sd(const eval::MeanSd& m) {
    return fmt::format("{}({})", f2(m.mean), f2(m.sd));
}

void print_rows(const std::vector<eval::ComparisonRow>& rows, std::string_view first, std::string_view second) {
    fmt::print("{:<10} {:>12} {:>12} {:>6} {:>6} {:>4} {:>5} {:<10} {:>5} {}\n", "Dimension", first, second, "W",
               "p", "", "r", "magnitude", "d", "H");
    for (const auto& row : rows) {
        const auto& s = row.stat;
        fmt::print("{:<10} {:>12} {:>12} {:>6} {:>6} {:>4} {:>5} {:<10} {:>5} {}\n", row.dimension,
                   mean_sd(row.first), mean_sd(row.second), f2(s.statistic), p3(s.p_value), eval::to_string(s.band),
                   f2(s.effect_size), eval::to_string(s.magnitude), f2(s.cohens_d), eval::to_string(s.hypothesis));
    }
}

json rows_json(const std::vector<eval::ComparisonRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) out.push_back(eval::to_json(r));
    return out;
}

std::unique_ptr<DiaryService> open_service(const std::string& data_dir, const std::string& study_config,
                                           const std::string& provider_config, const std::string& llm_config,
                                           int workers) {
    ServiceOptions opt;
    opt.data_dir = data_dir;
    opt.study = study_config_from_json(load_json_file(study_config));
    if (!provider_config.empty()) {
        opt.media = media_from_config(load_json_file(provider_config), fs::path(provider_config).parent_path());
    } else {
        opt.media = media_from_config(json::object(), fs::current_path());
    }
    if (!llm_config.empty()) {
        auto setup = llm_from_config(load_json_file(llm_config));
        opt.llm = setup.client;
        opt.llm_config = setup.config;
    }
    opt.workers = workers;
    return std::make_unique<DiaryService>(std::move(opt));
}

ApiServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diary study service with memo elicitation"};
    app.require_subcommand(1);
    std::string format = "table";

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    std::string host = "127.0.0.1", data_dir = "data", study_config, provider_config, llm_config;
    int port = 8080, workers = 2;
    serve->add_option("--host", host);
    serve->add_option("--port", port);
    serve->add_option("--data-dir", data_dir);
    serve->add_option("--study-config", study_config)->required()->check(CLI::ExistingFile);
    serve->add_option("--provider-config", provider_config)->check(CLI::ExistingFile);
    serve->add_option("--llm-config", llm_config)->check(CLI::ExistingFile);
    serve->add_option("--workers", workers)->check(CLI::PositiveNumber);

    // export
    auto* exp = app.add_subcommand("export", "Export entries, memos, notes and score-sheet templates");
    std::string study_id, out_dir = "export";
    exp->add_option("--study", study_id)->required();
    exp->add_option("--data-dir", data_dir);
    exp->add_option("--study-config", study_config)->required()->check(CLI::ExistingFile);
    exp->add_option("--out", out_dir);

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluation tables from exported data");
    ev->require_subcommand(1);
    ev->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
    std::string memos_path, scores_path, entries_path, dimension = "Location", by = "arm", test = "arms", a_csv,
        b_csv, study_start;
    bool one_sided = false;

    auto* emo = ev->add_subcommand("emotions", "Emotion prediction precision/recall/F1");
    emo->add_option("--memos", memos_path)->required()->check(CLI::ExistingFile);

    auto* hits = ev->add_subcommand("hits", "Hit ratio of preselected options");
    hits->add_option("--memos", memos_path)->required()->check(CLI::ExistingFile);
    hits->add_option("--dimension", dimension)->check(CLI::IsMember({"Location", "People", "Activity"}));

    auto* recall = ev->add_subcommand("recall", "Recall rubric means per arm (or arm x group)");
    recall->add_option("--scores", scores_path, "score sheets, .jsonl or .csv")->required()->check(CLI::ExistingFile);
    recall->add_option("--by", by)->check(CLI::IsMember({"arm", "arm-group"}));

    auto* stats = ev->add_subcommand("stats", "Wilcoxon rank-sum tests");
    stats->add_option("--test", test, "arms: Agent vs Baseline; carryover: G1 vs G2 per arm; samples: --a vs --b")
        ->check(CLI::IsMember({"arms", "carryover", "samples"}));
    stats->add_option("--scores", scores_path, "score sheets, .jsonl or .csv")->check(CLI::ExistingFile);
    stats->add_option("--a", a_csv, "comma-separated sample a (samples test)");
    stats->add_option("--b", b_csv, "comma-separated sample b (samples test)");
    stats->add_flag("--one-sided", one_sided, "Test a > b (Agent > Baseline, G1 > G2) instead of two-sided");

    auto* desc = ev->add_subcommand("descriptive", "Modality counts, hourly and daily distributions");
    desc->add_option("--entries", entries_path)->required()->check(CLI::ExistingFile);
    desc->add_option("--study-start", study_start, "YYYY-MM-DD; default: each participant's first day");

    CLI11_PARSE(app, argc, argv);
    const bool as_json = format == "json";
    const auto alternative = one_sided ? eval::Alternative::Greater : eval::Alternative::TwoSided;

    try {
        if (*serve) {
            auto svc = open_service(data_dir, study_config, provider_config, llm_config, workers);
            ApiServer server(*svc);
            g_server = &server;
            std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
            std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
            server.run(host, port);
            g_server = nullptr;
            return 0;
        }
        if (*exp) {
            auto svc = open_service(data_dir, study_config, "", "", 1);
            svc->stop();
            svc->export_study(study_id, out_dir);
            fmt::print("exported {} to {}\n", study_id, out_dir);
            return 0;
        }

        if (*emo) {
            const auto m = eval::emotion_metrics(eval::emotion_pairs(submitted_memos(memos_path)));
            if (as_json) {
                std::cout << eval::to_json(m).dump(2) << '\n';
            } else {
                fmt::print("{:<9} {:>9} {:>6} {:>8} {:>10}\n", "Class", "Precision", "Recall", "F1", "Proportion");
                for (const auto& [label, c] : m.per_class) {
                    fmt::print("{:<9} {:>9} {:>6} {:>8} {:>9}%\n", to_string(label), f2(c.precision), f2(c.recall),
                               f2(c.f1), f2(c.support_proportion * 100));
                }
                fmt::print("accuracy {}  macro-F1 {}  n={}\n", f2(m.accuracy), f2(m.macro_f1), m.n);
            }
        } else if (*hits) {
            const auto h = eval::hit_report(submitted_memos(memos_path), *parse_dimension(dimension));
            if (as_json) {
                std::cout << eval::to_json(h).dump(2) << '\n';
            } else {
                fmt::print("{} hit ratio {}({}) over {} participants, {} submissions\n", dimension, f2(h.mean),
                           f2(h.sd), h.participants.size(), h.submissions);
                for (const auto& [k, v] : h.option_count_proportions) {
                    fmt::print("  {:>2} options selected: {}%\n", k, f2(v * 100));
                }
            }
        } else if (*recall) {
            const auto cells = eval::aggregate_rubric(load_sheets(scores_path),
                                                      by == "arm" ? eval::GroupBy::Arm : eval::GroupBy::ArmAndGroup);
            if (as_json) {
                json out = json::array();
                for (const auto& c : cells) out.push_back(eval::to_json(c));
                std::cout << out.dump(2) << '\n';
            } else {
                fmt::print("{:<13} {:>4} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}\n", "Cell", "n", "Time",
                           "Location", "People", "Emotion", "Activity", "Total");
                for (const auto& c : cells) {
                    const auto name = c.group ? fmt::format("{}/{}", to_string(c.arm), to_string(*c.group))
                                              : std::string(to_string(c.arm));
                    fmt::print("{:<13} {:>4}", name, c.n);
                    for (const auto& ms : c.per_dimension) fmt::print(" {:>11}", mean_sd(ms));
                    fmt::print(" {:>11}\n", mean_sd(c.total));
                }
            }
        } else if (*stats && test == "samples") {
            if (a_csv.empty() || b_csv.empty()) throw Error(ErrorCode::InvalidArgument, "--a and --b are required");
            const auto r = eval::rank_sum_test(parse_numbers(a_csv), parse_numbers(b_csv), alternative);
            if (as_json) {
                std::cout << eval::to_json(r).dump(2) << '\n';
            } else {
                fmt::print("W={} p={} {} r={} ({}) d={} {} {}\n", f2(r.statistic), p3(r.p_value),
                           eval::to_string(r.band), f2(r.effect_size), eval::to_string(r.magnitude), f2(r.cohens_d),
                           eval::to_string(r.hypothesis), r.exact ? "exact" : "normal approximation");
            }
        } else if (*stats && test == "arms") {
            if (scores_path.empty()) throw Error(ErrorCode::InvalidArgument, "--scores is required");
            const auto rows = eval::compare_arms(load_sheets(scores_path), alternative);
            if (as_json) {
                std::cout << rows_json(rows).dump(2) << '\n';
            } else {
                print_rows(rows, "Baseline", "Agent");
            }
        } else if (*stats) {
            if (scores_path.empty()) throw Error(ErrorCode::InvalidArgument, "--scores is required");
            const auto by_arm = eval::carryover_check(load_sheets(scores_path), alternative);
            if (as_json) {
                json out = json::object();
                for (const auto& [arm, rows] : by_arm) out[std::string(to_string(arm))] = rows_json(rows);
                std::cout << out.dump(2) << '\n';
            } else {
                for (const auto& [arm, rows] : by_arm) {
                    fmt::print("{}\n", to_string(arm));
                    print_rows(rows, "G1", "G2");
                }
            }
        } else if (*desc) {
            std::vector<DiaryEntry> entries;
            for (const auto& j : read_jsonl(entries_path)) entries.push_back(j.get<DiaryEntry>());
            std::optional<std::chrono::local_days> start;
            if (!study_start.empty()) start = std::chrono::floor<std::chrono::days>(parse_local(study_start + "T00:00"));
            const auto d = eval::descriptive_stats(entries, start);
            if (as_json) {
                std::cout << eval::to_json(d).dump(2) << '\n';
            } else {
                fmt::print("{} entries from {} participants, {} per participant\n", d.total, d.participants,
                           mean_sd(d.entries_per_participant));
                for (const auto& [m, c] : d.modality_counts) fmt::print("  {:<14} {}\n", to_string(m), c);
                fmt::print("by hour:");
                for (auto c : d.hourly_histogram) fmt::print(" {}", c);
                fmt::print("\nper participant by day:");
                for (auto v : d.daily_average_by_day) fmt::print(" {}", f2(v));
                fmt::print("\n");
            }
        }
    } catch (const Error& e) {
        spdlog::error("{}: {}", to_string(e.code()), e.what());
        return 1;
    }
    return 0;
}
