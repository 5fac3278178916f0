// Acceptance runner: one PASS/FAIL line per primary criterion.
#include "cuediary/error.hpp"
#include "cuediary/evaluation.hpp"
#include "cuediary/memo.hpp"
#include "cuediary/predictor.hpp"
#include "cuediary/service.hpp"
#include "cuediary/text.hpp"

#include "memo_model.hpp"
#include "oracles.hpp"
#include "service_harness.hpp"
#include "test_support.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <functional>
#include <random>

using namespace cuediary;
using namespace std::chrono_literals;
namespace ct = cuediary::testing;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& name, std::chrono::milliseconds limit, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, fmt::format("exception: {}", e.what())};
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    if (elapsed > limit) {
        out.ok = false;
        out.detail += fmt::format(" [over the {:.0f} s limit]", std::chrono::duration<double>(limit).count());
    }
    if (!out.ok) ++failures;
    fmt::print("{} {} ({:.2f} s) {}\n", out.ok ? "PASS" : "FAIL", name, elapsed.count(), out.detail);
    std::fflush(stdout);
}

// ---- 1 --------------------------------------------------------------------

Outcome emotion_math() {
    const double f1 = eval::f1_score(0.80, 0.43);
    const double macro = eval::macro_average({0.56, 0.72, 0.79});
    const bool ok = std::abs(f1 - 0.56) <= 0.005 && std::abs(macro - 0.69) <= 0.005;
    return {ok, fmt::format("F1(0.80, 0.43) = {:.4f}, macro-F1 = {:.4f}", f1, macro)};
}

// ---- 2 --------------------------------------------------------------------

Outcome rank_sum_oracle() {
    std::mt19937 rng(20240611);
    double worst = 0;
    int compared = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t na = 1 + rng() % 9;
        const std::size_t nb = 1 + rng() % (10 - na);
        const bool integers = trial % 2 == 0;
        std::vector<double> a(na), b(nb);
        auto draw = [&] {
            return integers ? static_cast<double>(rng() % 5) : std::uniform_real_distribution<>(-5, 5)(rng);
        };
        for (auto& x : a) x = draw();
        for (auto& x : b) x = draw();
        const auto r = eval::rank_sum_test(a, b);
        if (!r.exact) return {false, fmt::format("trial {} did not use the exact path", trial)};
        worst = std::max(worst, std::abs(r.p_value - ct::permutation_p(a, b)));
        ++compared;
    }
    const double fixed = eval::rank_sum_test({1, 2, 3}, {4, 5, 6}).p_value;
    const bool ok = worst <= 1e-9 && fixed == 0.1;
    return {ok, fmt::format("{} inputs, max |p - oracle| = {:.3g}, p([1,2,3],[4,5,6]) = {}", compared, worst, fixed)};
}

// ---- 3 --------------------------------------------------------------------

Outcome band_magnitude_boundaries() {
    constexpr double eps = 1e-12;
    using eval::Band;
    using eval::Magnitude;
    // (p, expected band): each threshold is inclusive on the significant side.
    const std::vector<std::pair<double, Band>> bands = {
        {0.001 - eps, Band::StarStarStar}, {0.001, Band::StarStarStar}, {0.001 + eps, Band::StarStar},
        {0.010 - eps, Band::StarStar},     {0.010, Band::StarStar},     {0.010 + eps, Band::Star},
        {0.050 - eps, Band::Star},         {0.050, Band::Star},         {0.050 + eps, Band::Marginal},
        {0.100 - eps, Band::Marginal},     {0.100, Band::Marginal},     {0.100 + eps, Band::NS},
    };
    const std::vector<std::pair<double, Magnitude>> mags = {
        {0.10 - eps, Magnitude::Negligible}, {0.10, Magnitude::Small},    {0.10 + eps, Magnitude::Small},
        {0.30 - eps, Magnitude::Small},      {0.30, Magnitude::Moderate}, {0.30 + eps, Magnitude::Moderate},
        {0.50 - eps, Magnitude::Moderate},   {0.50, Magnitude::Large},    {0.50 + eps, Magnitude::Large},
    };
    int wrong = 0;
    std::string first;
    for (const auto& [p, want] : bands) {
        if (eval::classify_band(p) != want) {
            if (wrong++ == 0) first = fmt::format("p={:.15f}", p);
        }
    }
    for (const auto& [r, want] : mags) {
        if (eval::classify_magnitude(r) != want) {
            if (wrong++ == 0) first = fmt::format("r={:.15f}", r);
        }
    }
    return {wrong == 0, fmt::format("{} boundary probes, {} wrong {}", bands.size() + mags.size(), wrong, first)};
}

// ---- 4 --------------------------------------------------------------------

std::string random_word(std::mt19937& rng) {
    static const std::vector<std::string> words = {
        "Happy", "positive", "Positve", "NEGATIVE", "Sad", "", " ", "Colleague", "colleages", "Family",
        "friend", "Strangers", "Alone", "Acquaintance", "Neutral", "null", "😀", "Positive, Negative",
        "Acquaintances", "Families", "Friends", "Negative", "Positiv"};
    return words[rng() % words.size()];
}

std::string long_text(std::mt19937& rng) {
    static const std::vector<std::string> pieces = {"walking ", "caf\xC3\xA9 ", "\xE6\x97\xA5\xE8\xAE\xB0 ",
                                                    "a", "meeting-with-the-whole-team ", "\xF0\x9F\x98\x80 "};
    std::string s;
    const std::size_t n = rng() % 80;
    for (std::size_t i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
    return s;
}

json random_scalar(std::mt19937& rng) {
    switch (rng() % 5) {
        case 0: return random_word(rng);
        case 1: return static_cast<int>(rng() % 100);
        case 2: return nullptr;
        case 3: return json::array({random_word(rng), random_word(rng)});
        default: return long_text(rng);
    }
}

json random_list(std::mt19937& rng, std::size_t around) {
    json list = json::array();
    const std::size_t count = around - 3 + rng() % 7;  // around +/- 3
    for (std::size_t i = 0; i < count; ++i) {
        switch (rng() % 6) {
            case 0: list.push_back(long_text(rng)); break;
            case 1: list.push_back(""); break;
            case 2: list.push_back(list.empty() ? json("dup") : list.back()); break;
            case 3: list.push_back(static_cast<int>(rng() % 9)); break;
            default: list.push_back(fmt::format("Option {}", rng() % 1000)); break;
        }
    }
    return list;
}

std::string mutate(std::mt19937& rng) {
    json j = prediction_to_json(ct::sample_prediction());
    const int structural = static_cast<int>(rng() % 4);
    for (int k = 0; k <= structural; ++k) {
        switch (rng() % 9) {
            case 0: j["Emotion"] = random_scalar(rng); break;
            case 1: j["People"] = random_scalar(rng); break;
            case 2: j["Location"] = random_list(rng, 3); break;
            case 3: j["Activity"] = random_list(rng, 6); break;
            case 4: j.erase(std::vector<std::string>{"Location", "Emotion", "People", "Activity"}[rng() % 4]); break;
            case 5: j["Activity"][rng() % 6] = long_text(rng) + long_text(rng) + long_text(rng); break;
            case 6: j["Location"][rng() % 3] = long_text(rng); break;
            case 7: j["emotion"] = j.value("Emotion", json("Neutral")); j.erase("Emotion"); break;
            default: break;
        }
    }
    std::string raw = j.dump();
    switch (rng() % 8) {
        case 0: raw = "```json\n" + raw + "\n```"; break;
        case 1: raw = "Here you go: " + raw + " Hope this helps!"; break;
        case 2: raw = raw.substr(0, rng() % (raw.size() + 1)); break;
        case 3: {
            std::string bare;
            for (char c : raw) {
                if (c != '"') bare.push_back(c);
            }
            raw = bare;
            break;
        }
        case 4: {
            for (auto& c : raw) {
                if (c == '"') c = '\'';
            }
            break;
        }
        case 5:
            if (!raw.empty()) raw[rng() % raw.size()] = static_cast<char>(rng() % 256);
            break;
        default: break;
    }
    return raw;
}

Outcome hallucination_fuzz() {
    std::mt19937 rng(424242);
    int accepted = 0, oov = 0, bad_locations = 0, long_activities = 0, bad_storage = 0;
    const auto entry = ct::text_entry("fuzz");
    for (int i = 0; i < 10'000; ++i) {
        const auto out = parse_and_validate(mutate(rng));
        if (!out.ok()) continue;
        ++accepted;
        const auto& p = *out.prediction;
        if (!parse_emotion(to_string(p.emotion())) || !parse_people(to_string(p.people()))) ++oov;
        if (p.locations().size() != 3) ++bad_locations;
        for (const auto& loc : p.locations()) {
            if (loc.empty() || !text::scalar_count(loc)) ++bad_locations;
        }
        if (p.activities().size() != 6) ++long_activities;
        for (const auto& a : p.activities()) {
            const auto n = text::scalar_count(a);
            if (!n || *n > 151) ++long_activities;
        }
        // What would be stored: the generated memo, through its JSON form.
        try {
            const auto memo = generate_memo(pending_memo(entry), entry, p);
            const auto back = memo_from_json(json::parse(memo_to_json(memo).dump()));
            if (!(back == memo)) ++bad_storage;
        } catch (const std::exception&) {
            ++bad_storage;
        }
    }
    const bool ok = oov == 0 && bad_locations == 0 && long_activities == 0 && bad_storage == 0 && accepted > 0;
    return {ok, fmt::format("10000 responses, {} accepted after repair; out-of-vocabulary {}, location lists != 3 "
                            "{}, activities > 151 chars {}, storage mismatches {}",
                            accepted, oov, bad_locations, long_activities, bad_storage)};
}

// ---- 5 --------------------------------------------------------------------

struct Plan {
    bool keep_location;
    bool keep_people;
    bool keep_activity;
};

Outcome end_to_end() {
    ct::TempDir dir;
    auto llm = std::make_shared<ct::ScriptedLlm>(std::vector<std::string>{ct::ScriptedLlm::kSleep, ct::ScriptedLlm::kSleep});
    llm->sleep_for = 60s;
    DiaryService svc(ct::service_options(dir.path(), llm, 90s));

    struct Post {
        std::string channel;
        std::string owner;
        PostPayload payload;
    };
    std::vector<Post> posts;
    const std::vector<std::pair<std::string, std::string>> images = {
        {"image/jpeg", "desk.jpg"}, {"image/jpeg", "kayak.jpg"}, {"image/png", "brunch.png"}, {"image/jpeg", "desk.jpg"}};
    const std::vector<std::string> audios = {"voice_parents.wav", "voice_overtime.wav", "meetup.wav",
                                             "voice_parents.wav"};
    const std::vector<std::string> videos = {"lab_tour.mp4", "kayak.mp4", "park_walk.mp4", "kayak.mp4"};
    for (int i = 0; i < 4; ++i) {
        const std::string ch = i % 2 ? "agent-p2" : "agent-p1";
        const std::string who = i % 2 ? "p2" : "p1";
        posts.push_back({ch, who, ct::text_post(fmt::format("text entry number {}", i))});
        posts.push_back({ch, who, ct::media_post(images[i].first, images[i].second)});
        posts.push_back({ch, who, ct::media_post("image/jpeg", "kayak.jpg", fmt::format("weekend trip {}", i))});
        posts.push_back({ch, who, ct::media_post("audio/wav", audios[i])});
        posts.push_back({ch, who, ct::media_post("video/mp4", videos[i])});
    }

    std::vector<std::string> ids;
    std::chrono::duration<double> slowest{0};
    for (const auto& p : posts) {
        const auto t0 = std::chrono::steady_clock::now();
        ids.push_back(svc.receive_post(p.channel, p.owner, p.payload).entry_id);
        slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0));
        if (ids.size() == 1) {
            // Let the first job reach the stub before the remaining posts arrive.
            const auto deadline = std::chrono::steady_clock::now() + 5s;
            while (llm->calls() == 0 && std::chrono::steady_clock::now() < deadline) std::this_thread::sleep_for(1ms);
        }
    }
    const int stub_calls_during_acks = llm->calls();
    llm->release();
    if (!svc.wait_idle(100s)) return {false, "processing did not finish"};

    std::set<Modality> modalities;
    int generated = 0;
    for (const auto& id : ids) {
        modalities.insert(svc.entry(id).modality);
        if (svc.memo_for_entry(id).state == MemoState::Generated) ++generated;
    }

    // Edit plan for the first 15 memos; the oracle counts hits from the plan alone.
    std::vector<Plan> plans;
    for (int i = 0; i < 15; ++i) plans.push_back({i % 3 != 0, i % 5 != 1, i % 4 != 2});
    std::vector<Memo> submitted;
    std::map<std::string, std::array<int, 4>> counts;  // participant -> loc hits, people hits, act hits, n
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto memo = svc.memo_for_entry(ids[i]);
        const auto& plan = plans[i];
        std::vector<MemoEdit> edits;
        const auto& pred = *memo.prediction;
        if (!plan.keep_location) {
            edits.push_back(edit::DeselectLocation{pred.locations()[0]});
            edits.push_back(edit::SelectLocation{pred.locations()[1 + i % 2]});
        } else if (i % 2) {
            edits.push_back(edit::SelectLocation{pred.locations()[2]});
        }
        if (!plan.keep_people) {
            edits.push_back(edit::AddPeople{PeopleLabel::Alone});
            edits.push_back(edit::RemovePeople{pred.people()});
        }
        if (!plan.keep_activity) {
            edits.push_back(edit::DeselectActivity{pred.activities()[0]});
            edits.push_back(edit::SelectActivity{pred.activities()[4]});
        }
        edits.push_back(edit::SetEmotion{i % 2 ? EmotionLabel::Neutral : pred.emotion()});
        svc.edit_memo(memo.memo_id, edits);
        svc.submit(memo.memo_id);
        submitted.push_back(svc.memo(memo.memo_id));
        auto& c = counts[posts[i].owner];
        c[0] += plan.keep_location;
        c[1] += plan.keep_people;
        c[2] += plan.keep_activity;
        c[3] += 1;
    }

    int mismatches = 0;
    const std::array<Dimension, 3> dims = {Dimension::Location, Dimension::People, Dimension::Activity};
    for (std::size_t d = 0; d < dims.size(); ++d) {
        const auto report = eval::hit_report(submitted, dims[d]);
        std::vector<double> want;
        for (const auto& [who, c] : counts) want.push_back(static_cast<double>(c[d]) / c[3]);
        if (report.per_participant_hit_ratio.size() != want.size()) {
            ++mismatches;
            continue;
        }
        for (std::size_t k = 0; k < want.size(); ++k) {
            if (std::abs(report.per_participant_hit_ratio[k] - want[k]) > 1e-12) ++mismatches;
        }
        const double mean = (want[0] + want[1]) / 2;
        if (std::abs(report.mean - mean) > 1e-12) ++mismatches;
    }

    const bool ok = ids.size() == 20 && modalities.size() == 5 && generated == 20 && submitted.size() == 15 &&
                    mismatches == 0 && slowest < kAckDeadline && stub_calls_during_acks >= 1;
    return {ok, fmt::format("20 posts over {} modalities, {} memos Generated, 15 submitted, hit-ratio mismatches {}, "
                            "slowest ack {:.3f} s while {} stub call(s) slept",
                            modalities.size(), generated, mismatches, slowest.count(), stub_calls_during_acks)};
}

// ---- 6 --------------------------------------------------------------------

Outcome state_machine() {
    const auto r = ct::enumerate_memo_traces(6);
    return {r.mismatches == 0, fmt::format("{} traces of length <= 6, {} violations {}", r.traces, r.mismatches,
                                           r.first_failure)};
}

// ---- 7 --------------------------------------------------------------------

Outcome crash_restart() {
    std::mt19937 rng(777);
    int bad = 0;
    int crashes = 0;
    std::string first;
    const std::vector<std::pair<std::string, std::string>> media = {
        {"image/jpeg", "desk.jpg"}, {"video/mp4", "kayak.mp4"}, {"audio/wav", "meetup.wav"}, {"", ""}};
    for (int run = 0; run < 20; ++run) {
        ct::TempDir dir;
        const auto point = kAllCrashPoints[rng() % kAllCrashPoints.size()];
        const std::size_t victim = rng() % 3;
        {
            auto opts = ct::service_options(dir.path(), std::make_shared<ct::ScriptedLlm>());
            opts.workers = 1;
            // Crash on the victim-th time the chosen point is reached.
            auto hits = std::make_shared<std::size_t>(0);
            opts.crash_hook = [point, victim, hits](CrashPoint p, const std::string&) {
                if (p == point && (*hits)++ == victim) throw SimulatedCrash();
            };
            DiaryService svc(std::move(opts));
            for (std::size_t k = 0; k < 3 && !svc.crashed(); ++k) {
                const auto& [mime, name] = media[rng() % media.size()];
                try {
                    svc.receive_post("agent-p1", "p1",
                                     mime.empty() ? ct::text_post("post " + std::to_string(k)) : ct::media_post(mime, name));
                } catch (const SimulatedCrash&) {
                    break;
                }
            }
            svc.wait_idle(10s);
            crashes += svc.crashed() ? 1 : 0;
        }
        DiaryService again(ct::service_options(dir.path(), std::make_shared<ct::ScriptedLlm>()));
        if (!again.wait_idle(20s)) {
            if (bad++ == 0) first = fmt::format("run {} ({}) did not settle", run, to_string(point));
            continue;
        }
        const auto entries = again.store().all_entries();
        const auto memos = again.store().all_memos();
        std::map<std::string, int> per_entry;
        for (const auto& m : memos) {
            if (m.state == MemoState::Generated) per_entry[m.entry_id] += 1;
        }
        bool run_ok = memos.size() == entries.size() && !entries.empty();
        for (const auto& e : entries) run_ok = run_ok && per_entry[e.entry_id] == 1;
        if (!run_ok && bad++ == 0) {
            first = fmt::format("run {} ({}): {} entries, {} memos", run, to_string(point), entries.size(), memos.size());
        }
    }
    return {bad == 0 && crashes == 20,
            fmt::format("20 randomized crash points, {} crashed, {} runs without exactly one memo per entry {}",
                        crashes, bad, first)};
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::off);
    criterion("emotion-metric-math", 1s, emotion_math);
    criterion("rank-sum-exact-oracle", 30s, rank_sum_oracle);
    criterion("band-magnitude-boundaries", 1s, band_magnitude_boundaries);
    criterion("hallucination-fuzz", 60s, hallucination_fuzz);
    criterion("end-to-end-pipeline", 120s, end_to_end);
    criterion("memo-state-machine", 60s, state_machine);
    criterion("crash-restart-replay", 120s, crash_restart);
    fmt::print("{} of 7 criteria passed\n", 7 - failures);
    return failures == 0 ? 0 : 1;
}
