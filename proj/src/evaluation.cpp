#include "cuediary/evaluation.hpp"

#include "cuediary/error.hpp"
#include "cuediary/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

namespace cuediary::eval {

std::string_view to_string(Band b) {
    switch (b) {
        case Band::NS: return "-";
        case Band::Marginal: return "+";
        case Band::Star: return "*";
        case Band::StarStar: return "**";
        case Band::StarStarStar: return "***";
    }
    return "-";
}

std::string_view to_string(Magnitude m) {
    switch (m) {
        case Magnitude::Negligible: return "negligible";
        case Magnitude::Small: return "small";
        case Magnitude::Moderate: return "moderate";
        case Magnitude::Large: return "large";
    }
    return "negligible";
}

std::string_view to_string(Hypothesis h) {
    return h == Hypothesis::Accepted ? "Acc." : "Rej.";
}

std::string_view to_string(Alternative a) {
    switch (a) {
        case Alternative::TwoSided: return "two-sided";
        case Alternative::Greater: return "greater";
        case Alternative::Less: return "less";
    }
    return "two-sided";
}

Band classify_band(double p) {
    if (p <= 0.001) return Band::StarStarStar;
    if (p <= 0.010) return Band::StarStar;
    if (p <= 0.050) return Band::Star;
    if (p <= 0.100) return Band::Marginal;
    return Band::NS;
}

Magnitude classify_magnitude(double r) {
    if (r >= 0.50) return Magnitude::Large;
    if (r >= 0.30) return Magnitude::Moderate;
    if (r >= 0.10) return Magnitude::Small;
    return Magnitude::Negligible;
}

Hypothesis decide(double p) {
    return p <= 0.050 ? Hypothesis::Accepted : Hypothesis::Rejected;
}

// ---- rank-sum test --------------------------------------------------------

namespace {

struct Ranking {
    std::vector<std::int64_t> doubled_ranks;  // aligned with the concatenation a ++ b
    double tie_term = 0.0;                    // sum over tie groups of t^3 - t
};

Ranking rank_pooled(const std::vector<double>& pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });

    Ranking r;
    r.doubled_ranks.assign(pooled.size(), 0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        // positions i..j (0-based) share the mid-rank ((i+1)+(j+1))/2
        const auto doubled = static_cast<std::int64_t>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) r.doubled_ranks[order[k]] = doubled;
        const double t = static_cast<double>(j - i + 1);
        r.tie_term += t * t * t - t;
        i = j + 1;
    }
    return r;
}

// Exact p from the distribution of the doubled rank sum of n_a items drawn
// from the pooled ranks (dynamic programme over subset size and sum).
double exact_p(const std::vector<std::int64_t>& doubled_ranks, std::size_t n_a, std::int64_t observed,
               Alternative alternative) {
    const std::int64_t max_sum = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), std::int64_t{0});
    std::vector<std::vector<double>> ways(n_a + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (const auto rank : doubled_ranks) {
        for (std::size_t k = n_a; k >= 1; --k) {
            for (std::int64_t s = max_sum; s >= rank; --s) {
                ways[k][static_cast<std::size_t>(s)] += ways[k - 1][static_cast<std::size_t>(s - rank)];
            }
        }
    }
    const auto n = static_cast<std::int64_t>(doubled_ranks.size());
    const std::int64_t expected = static_cast<std::int64_t>(n_a) * (n + 1);  // doubled
    double total = 0.0;
    double extreme = 0.0;
    for (std::int64_t s = 0; s <= max_sum; ++s) {
        const double w = ways[n_a][static_cast<std::size_t>(s)];
        if (w == 0.0) continue;
        total += w;
        bool counts = false;
        switch (alternative) {
            case Alternative::TwoSided: counts = std::llabs(s - expected) >= std::llabs(observed - expected); break;
            case Alternative::Greater: counts = s >= observed; break;
            case Alternative::Less: counts = s <= observed; break;
        }
        if (counts) extreme += w;
    }
    return std::min(1.0, extreme / total);
}

}  // namespace

double cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() + b.size() < 3) return 0.0;
    auto sample_var = [](const std::vector<double>& xs, double mean) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        return ss;
    };
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
    const double pooled = std::sqrt((sample_var(a, ma) + sample_var(b, mb)) / static_cast<double>(a.size() + b.size() - 2));
    if (pooled == 0.0) return 0.0;
    return (ma - mb) / pooled;
}

StatResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b, Alternative alternative) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::EmptyGroup, fmt::format("rank-sum test needs two non-empty groups ({} vs {})",
                                                       a.size(), b.size()));
    }
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranking = rank_pooled(pooled);

    const std::size_t n_a = a.size();
    const std::size_t n_b = b.size();
    const double n = static_cast<double>(n_a + n_b);
    const std::int64_t w2 = std::accumulate(ranking.doubled_ranks.begin(),
                                            ranking.doubled_ranks.begin() + static_cast<std::ptrdiff_t>(n_a),
                                            std::int64_t{0});

    StatResult r;
    r.n_a = n_a;
    r.n_b = n_b;
    r.rank_sum = static_cast<double>(w2) / 2.0;
    r.cohens_d = cohens_d(a, b);

    const double expected = static_cast<double>(n_a) * (n + 1.0) / 2.0;
    const double variance = static_cast<double>(n_a * n_b) / 12.0 * ((n + 1.0) - ranking.tie_term / (n * (n - 1.0)));
    const double diff = r.rank_sum - expected;

    double z = 0.0;
    double p_normal = 1.0;
    if (variance > 0.0) {
        const double sd = std::sqrt(variance);
        switch (alternative) {
            case Alternative::TwoSided:
                z = std::max(std::abs(diff) - 0.5, 0.0) / sd;
                p_normal = std::erfc(z / std::sqrt(2.0));
                break;
            case Alternative::Greater:
                z = (diff - 0.5) / sd;
                p_normal = 0.5 * std::erfc(z / std::sqrt(2.0));
                break;
            case Alternative::Less:
                z = (diff + 0.5) / sd;
                p_normal = 0.5 * std::erfc(-z / std::sqrt(2.0));
                break;
        }
    }
    r.statistic = std::abs(z);

    if (variance <= 0.0) {
        r.exact = n_a + n_b <= kExactLimit;
        r.p_value = 1.0;  // every observation identical
    } else if (n_a + n_b <= kExactLimit) {
        r.exact = true;
        r.p_value = exact_p(ranking.doubled_ranks, n_a, w2, alternative);
    } else {
        r.p_value = std::min(1.0, p_normal);
    }

    r.band = classify_band(r.p_value);
    r.effect_size = r.statistic / std::sqrt(n);
    r.magnitude = classify_magnitude(r.effect_size);
    r.hypothesis = decide(r.p_value);
    return r;
}

// ---- descriptive helpers --------------------------------------------------

MeanSd mean_sd(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / n)};
}

double round_half_up(double x, int digits) {
    const double scale = std::pow(10.0, digits);
    const double sign = x < 0 ? -1.0 : 1.0;
    // The epsilon absorbs representation error such as 1.005 * 100 = 100.4999...
    return sign * std::floor(std::abs(x) * scale + 0.5 + 1e-9) / scale;
}

double agreement_ratio(const std::vector<int>& rater_a, const std::vector<int>& rater_b) {
    if (rater_a.size() != rater_b.size()) {
        throw Error(ErrorCode::InvalidArgument, "raters scored different numbers of items");
    }
    if (rater_a.empty()) throw Error(ErrorCode::EmptyInput, "no scores to compare");
    std::size_t same = 0;
    for (std::size_t i = 0; i < rater_a.size(); ++i) same += rater_a[i] == rater_b[i] ? 1 : 0;
    return static_cast<double>(same) / static_cast<double>(rater_a.size());
}

// ---- emotion --------------------------------------------------------------

double f1_score(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double macro_average(const std::vector<double>& values) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "nothing to average");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

EmotionMetrics emotion_metrics(const std::vector<std::pair<EmotionLabel, EmotionLabel>>& pairs) {
    if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "no (predicted, truth) pairs");
    EmotionMetrics m;
    m.n = pairs.size();
    std::size_t correct = 0;
    for (const auto& [pred, truth] : pairs) correct += pred == truth ? 1 : 0;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(pairs.size());

    std::vector<double> f1s;
    for (auto label : kAllEmotions) {
        std::size_t tp = 0, predicted = 0, actual = 0;
        for (const auto& [pred, truth] : pairs) {
            tp += (pred == label && truth == label) ? 1 : 0;
            predicted += pred == label ? 1 : 0;
            actual += truth == label ? 1 : 0;
        }
        ClassMetrics c;
        c.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        c.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
        c.f1 = f1_score(c.precision, c.recall);
        c.support_proportion = static_cast<double>(actual) / static_cast<double>(pairs.size());
        m.per_class[label] = c;
        f1s.push_back(c.f1);
    }
    m.macro_f1 = macro_average(f1s);
    return m;
}

std::vector<std::pair<EmotionLabel, EmotionLabel>> emotion_pairs(const std::vector<Memo>& memos) {
    std::vector<std::pair<EmotionLabel, EmotionLabel>> out;
    for (const auto& m : memos) {
        if (m.state != MemoState::Submitted) {
            throw Error(ErrorCode::UnsubmittedMemo, fmt::format("memo {} is not submitted", m.memo_id));
        }
        if (!m.prediction) continue;
        out.emplace_back(m.prediction->emotion(), m.selected_emotion);
    }
    return out;
}

// ---- hit ratio ------------------------------------------------------------

HitReport hit_report(const std::vector<Memo>& memos, Dimension dimension) {
    if (dimension != Dimension::Location && dimension != Dimension::People && dimension != Dimension::Activity) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("hit ratio is defined for Location, People and Activity, not {}", to_string(dimension)));
    }
    if (memos.empty()) throw Error(ErrorCode::EmptyInput, "no memos");

    std::map<std::string, std::pair<std::size_t, std::size_t>> per_participant;  // hits, submissions
    std::map<std::string, std::size_t> buckets{{"0", 0}, {"1", 0}, {"2", 0}, {">2", 0}};
    for (const auto& m : memos) {
        if (m.state != MemoState::Submitted || !m.preselected) {
            throw Error(ErrorCode::UnsubmittedMemo, fmt::format("memo {} is not submitted", m.memo_id));
        }
        bool hit = false;
        std::size_t selected = 0;
        switch (dimension) {
            case Dimension::Location:
                hit = m.preselected->location && m.selected_locations.count(*m.preselected->location) > 0;
                selected = m.selected_locations.size();
                break;
            case Dimension::People:
                hit = m.selected_people.count(m.preselected->people) > 0;
                selected = m.selected_people.size();
                break;
            case Dimension::Activity:
                hit = m.preselected->activity && m.selected_activities.count(*m.preselected->activity) > 0;
                selected = m.selected_activities.size();
                break;
            default: break;
        }
        auto& slot = per_participant[m.participant_id];
        slot.first += hit ? 1 : 0;
        slot.second += 1;
        buckets[selected > 2 ? ">2" : std::to_string(selected)] += 1;
    }

    HitReport h;
    h.dimension = dimension;
    h.submissions = memos.size();
    for (const auto& [participant, counts] : per_participant) {
        h.participants.push_back(participant);
        h.per_participant_hit_ratio.push_back(static_cast<double>(counts.first) / static_cast<double>(counts.second));
    }
    const auto stats = mean_sd(h.per_participant_hit_ratio);
    h.mean = stats.mean;
    h.sd = stats.sd;
    for (const auto& [bucket, count] : buckets) {
        h.option_count_proportions[bucket] = static_cast<double>(count) / static_cast<double>(memos.size());
    }
    return h;
}

// ---- recall rubric --------------------------------------------------------

namespace {

void check_scores(const std::vector<RecallScoreSheet>& sheets) {
    for (const auto& s : sheets) {
        for (auto d : kAllDimensions) {
            const int v = s.score(d);
            if (v < 0 || v > 2) {
                throw Error(ErrorCode::ScoreOutOfRange,
                            fmt::format("entry {}: {} score {} is outside 0..2", s.entry_id, to_string(d), v),
                            std::string(to_string(d)));
            }
        }
    }
}

void require_groups(const std::vector<RecallScoreSheet>& sheets) {
    for (const auto& s : sheets) {
        if (!s.group) {
            throw Error(ErrorCode::MissingGroupLabel, fmt::format("entry {} has no participant group", s.entry_id));
        }
    }
}

ComparisonRow compare(const std::vector<RecallScoreSheet>& sheets, std::optional<Dimension> dim,
                      std::optional<SystemArm> arm_a, std::optional<ParticipantGroup> group_a,
                      std::optional<SystemArm> arm_b, std::optional<ParticipantGroup> group_b,
                      Alternative alternative) {
    const auto a = scores_of(sheets, dim, arm_a, group_a);
    const auto b = scores_of(sheets, dim, arm_b, group_b);
    ComparisonRow row;
    row.dimension = dim ? std::string(to_string(*dim)) : "Total";
    row.stat = rank_sum_test(a, b, alternative);
    row.first = mean_sd(a);
    row.second = mean_sd(b);
    return row;
}

}  // namespace

std::vector<double> scores_of(const std::vector<RecallScoreSheet>& sheets, std::optional<Dimension> dimension,
                              std::optional<SystemArm> arm, std::optional<ParticipantGroup> group) {
    std::vector<double> out;
    for (const auto& s : sheets) {
        if (arm && s.arm != *arm) continue;
        if (group && s.group != group) continue;
        out.push_back(static_cast<double>(dimension ? s.score(*dimension) : s.total()));
    }
    return out;
}

std::vector<RubricCell> aggregate_rubric(const std::vector<RecallScoreSheet>& sheets, GroupBy group_by) {
    check_scores(sheets);
    if (group_by == GroupBy::ArmAndGroup) require_groups(sheets);

    std::map<std::pair<int, int>, std::vector<const RecallScoreSheet*>> cells;
    for (const auto& s : sheets) {
        const int g = group_by == GroupBy::ArmAndGroup ? static_cast<int>(*s.group) : -1;
        cells[{static_cast<int>(s.arm), g}].push_back(&s);
    }
    std::vector<RubricCell> out;
    for (const auto& [key, members] : cells) {
        RubricCell c;
        c.arm = static_cast<SystemArm>(key.first);
        if (key.second >= 0) c.group = static_cast<ParticipantGroup>(key.second);
        c.n = members.size();
        for (auto d : kAllDimensions) {
            std::vector<double> xs;
            for (const auto* s : members) xs.push_back(s->score(d));
            c.per_dimension[static_cast<std::size_t>(d)] = mean_sd(xs);
        }
        std::vector<double> totals;
        for (const auto* s : members) totals.push_back(s->total());
        c.total = mean_sd(totals);
        out.push_back(c);
    }
    return out;
}

std::vector<ComparisonRow> compare_arms(const std::vector<RecallScoreSheet>& sheets, Alternative alternative) {
    check_scores(sheets);
    std::vector<ComparisonRow> rows;
    for (auto d : kAllDimensions) {
        auto row = compare(sheets, d, SystemArm::Agent, std::nullopt, SystemArm::Baseline, std::nullopt, alternative);
        std::swap(row.first, row.second);  // report Baseline first
        rows.push_back(row);
    }
    auto total = compare(sheets, std::nullopt, SystemArm::Agent, std::nullopt, SystemArm::Baseline, std::nullopt,
                         alternative);
    std::swap(total.first, total.second);
    rows.push_back(total);
    return rows;
}

std::map<SystemArm, std::vector<ComparisonRow>> carryover_check(const std::vector<RecallScoreSheet>& sheets,
                                                                Alternative alternative) {
    check_scores(sheets);
    require_groups(sheets);
    std::set<SystemArm> arms;
    for (const auto& s : sheets) arms.insert(s.arm);

    std::map<SystemArm, std::vector<ComparisonRow>> out;
    for (auto arm : arms) {
        auto& rows = out[arm];
        for (auto d : kAllDimensions) {
            rows.push_back(compare(sheets, d, arm, ParticipantGroup::G1, arm, ParticipantGroup::G2, alternative));
        }
        rows.push_back(compare(sheets, std::nullopt, arm, ParticipantGroup::G1, arm, ParticipantGroup::G2, alternative));
    }
    return out;
}

// ---- descriptive ----------------------------------------------------------

DescriptiveStats descriptive_stats(const std::vector<DiaryEntry>& entries,
                                   std::optional<std::chrono::local_days> study_start) {
    DescriptiveStats d;
    for (auto m : {Modality::Text, Modality::Image, Modality::TextAndImage, Modality::Audio, Modality::Video}) {
        d.modality_counts[m] = 0;
    }
    d.total = entries.size();
    if (entries.empty()) return d;

    std::map<std::string, std::chrono::local_days> first_day;
    std::map<std::string, std::size_t> per_participant;
    for (const auto& e : entries) {
        d.modality_counts[e.modality] += 1;
        d.hourly_histogram[static_cast<std::size_t>(local_hour(e.created_at, e.utc_offset_minutes))] += 1;
        const auto day = local_day(e.created_at, e.utc_offset_minutes);
        auto [it, inserted] = first_day.emplace(e.participant_id, day);
        if (!inserted && day < it->second) it->second = day;
        per_participant[e.participant_id] += 1;
    }
    d.participants = per_participant.size();

    std::array<std::size_t, 7> per_day{};
    for (const auto& e : entries) {
        const auto start = study_start.value_or(first_day.at(e.participant_id));
        const auto idx = (local_day(e.created_at, e.utc_offset_minutes) - start).count();
        if (idx >= 0 && idx < 7) per_day[static_cast<std::size_t>(idx)] += 1;
    }
    for (std::size_t i = 0; i < 7; ++i) {
        d.daily_average_by_day[i] = static_cast<double>(per_day[i]) / static_cast<double>(d.participants);
    }
    std::vector<double> counts;
    for (const auto& [_, c] : per_participant) counts.push_back(static_cast<double>(c));
    d.entries_per_participant = mean_sd(counts);
    return d;
}

std::vector<DiaryEntry> rubric_eligible(const std::vector<DiaryEntry>& entries) {
    std::vector<DiaryEntry> out;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(out), [](const DiaryEntry& e) {
        return e.modality == Modality::Text || e.modality == Modality::TextAndImage || e.modality == Modality::Audio;
    });
    return out;
}

// ---- JSON -----------------------------------------------------------------

json to_json(const StatResult& r) {
    return json{{"statistic", r.statistic},   {"p_value", r.p_value},
                {"band", to_string(r.band)},  {"effect_size", r.effect_size},
                {"magnitude", to_string(r.magnitude)}, {"hypothesis", to_string(r.hypothesis)},
                {"cohens_d", r.cohens_d},     {"rank_sum", r.rank_sum},
                {"exact", r.exact},           {"n_a", r.n_a},
                {"n_b", r.n_b}};
}

json to_json(const EmotionMetrics& m) {
    json per_class = json::object();
    for (const auto& [label, c] : m.per_class) {
        per_class[std::string(cuediary::to_string(label))] = json{
            {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support_proportion", c.support_proportion}};
    }
    return json{{"per_class", per_class}, {"accuracy", m.accuracy}, {"macro_f1", m.macro_f1}, {"n", m.n}};
}

json to_json(const HitReport& h) {
    json per = json::object();
    for (std::size_t i = 0; i < h.participants.size(); ++i) per[h.participants[i]] = h.per_participant_hit_ratio[i];
    return json{{"dimension", cuediary::to_string(h.dimension)},
                {"per_participant_hit_ratio", per},
                {"mean", h.mean},
                {"sd", h.sd},
                {"option_count_proportions", h.option_count_proportions},
                {"submissions", h.submissions}};
}

json to_json(const RubricCell& c) {
    json dims = json::object();
    for (auto d : kAllDimensions) {
        const auto& ms = c.per_dimension[static_cast<std::size_t>(d)];
        dims[std::string(cuediary::to_string(d))] = json{{"mean", ms.mean}, {"sd", ms.sd}};
    }
    json j{{"arm", cuediary::to_string(c.arm)},
           {"n", c.n},
           {"dimensions", dims},
           {"total", json{{"mean", c.total.mean}, {"sd", c.total.sd}}}};
    if (c.group) j["group"] = cuediary::to_string(*c.group);
    return j;
}

json to_json(const ComparisonRow& row) {
    return json{{"dimension", row.dimension},
                {"first", json{{"mean", row.first.mean}, {"sd", row.first.sd}}},
                {"second", json{{"mean", row.second.mean}, {"sd", row.second.sd}}},
                {"test", to_json(row.stat)}};
}

json to_json(const DescriptiveStats& d) {
    json modality = json::object();
    for (const auto& [m, c] : d.modality_counts) modality[std::string(cuediary::to_string(m))] = c;
    return json{{"modality_counts", modality},
                {"hourly_histogram", d.hourly_histogram},
                {"daily_average_by_day", d.daily_average_by_day},
                {"total", d.total},
                {"participants", d.participants},
                {"entries_per_participant",
                 json{{"mean", d.entries_per_participant.mean}, {"sd", d.entries_per_participant.sd}}}};
}

RecallScoreSheet score_sheet_from_json(const json& j) {
    RecallScoreSheet s;
    try {
        s.entry_id = j.at("entry_id").get<std::string>();
        const auto arm = parse_arm(j.at("arm").get<std::string>());
        if (!arm) throw Error(ErrorCode::InvalidArgument, fmt::format("entry {}: unknown arm", s.entry_id));
        s.arm = *arm;
        if (j.contains("group") && !j["group"].is_null()) {
            s.group = parse_group(j["group"].get<std::string>());
            if (!s.group) throw Error(ErrorCode::InvalidArgument, fmt::format("entry {}: unknown group", s.entry_id));
        }
        const auto& scores = j.at("scores");
        for (auto d : kAllDimensions) {
            const auto& v = scores.at(std::string(cuediary::to_string(d)));
            if (!v.is_number_integer()) {
                throw Error(ErrorCode::InvalidArgument,
                            fmt::format("entry {}: {} is not scored", s.entry_id, cuediary::to_string(d)),
                            std::string(cuediary::to_string(d)));
            }
            s.scores[static_cast<std::size_t>(d)] = v.get<int>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("score sheet: {}", e.what()));
    }
    return s;
}

json score_sheet_to_json(const RecallScoreSheet& s) {
    json scores = json::object();
    for (auto d : kAllDimensions) scores[std::string(cuediary::to_string(d))] = s.score(d);
    return json{{"entry_id", s.entry_id},
                {"arm", cuediary::to_string(s.arm)},
                {"group", s.group ? json(cuediary::to_string(*s.group)) : json(nullptr)},
                {"scores", scores}};
}

std::vector<RecallScoreSheet> score_sheets_from_csv(std::string_view csv) {
    auto split_row = [](std::string_view line) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            auto cell = text::trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
            if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') cell = cell.substr(1, cell.size() - 2);
            cells.push_back(std::move(cell));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        return cells;
    };

    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < csv.size()) {
        auto nl = csv.find('\n', start);
        if (nl == std::string_view::npos) nl = csv.size();
        auto line = text::trim(csv.substr(start, nl - start));
        if (!line.empty()) lines.push_back(std::move(line));
        start = nl + 1;
    }
    if (lines.empty()) throw Error(ErrorCode::InvalidArgument, "score sheet CSV is empty");

    std::map<std::string, std::size_t> col;
    const auto header = split_row(lines.front());
    for (std::size_t i = 0; i < header.size(); ++i) col[text::to_lower(header[i])] = i;
    for (const char* name : {"entry_id", "arm", "group", "time", "location", "people", "emotion", "activity"}) {
        if (!col.count(name)) throw Error(ErrorCode::InvalidArgument, fmt::format("CSV lacks column '{}'", name), name);
    }

    std::vector<RecallScoreSheet> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_row(lines[r]);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("CSV row {} has {} cells, header has {}", r + 1, cells.size(), header.size()));
        }
        json scores = json::object();
        for (auto d : kAllDimensions) {
            const std::string name(cuediary::to_string(d));
            const auto& cell = cells[col.at(text::to_lower(name))];
            if (cell.empty() || cell.find_first_not_of("-0123456789") != std::string::npos) {
                throw Error(ErrorCode::InvalidArgument, fmt::format("CSV row {}: {} '{}' is not an integer", r + 1, name, cell),
                            name);
            }
            scores[name] = std::stoi(cell);
        }
        const auto& group = cells[col.at("group")];
        out.push_back(score_sheet_from_json(json{{"entry_id", cells[col.at("entry_id")]},
                                                 {"arm", cells[col.at("arm")]},
                                                 {"group", group.empty() ? json(nullptr) : json(group)},
                                                 {"scores", scores}}));
    }
    return out;
}

}  // namespace cuediary::eval
