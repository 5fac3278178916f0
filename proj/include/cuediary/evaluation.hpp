#pragma once

#include "cuediary/domain.hpp"
#include "cuediary/memo.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cuediary::eval {

// ---- significance and effect-size classes ---------------------------------

/// p-value bands: "-" p > .100, "+" .050 < p <= .100, "*" .010 < p <= .050,
/// "**" .001 < p <= .010, "***" p <= .001.
enum class Band { NS, Marginal, Star, StarStar, StarStarStar };
enum class Magnitude { Negligible, Small, Moderate, Large };
enum class Hypothesis { Accepted, Rejected };
enum class Alternative { TwoSided, Greater, Less };

std::string_view to_string(Band b);  // "-", "+", "*", "**", "***"
std::string_view to_string(Magnitude m);
std::string_view to_string(Hypothesis h);
std::string_view to_string(Alternative a);

Band classify_band(double p);
/// < .10 negligible, [.10, .30) small, [.30, .50) moderate, >= .50 large.
Magnitude classify_magnitude(double effect_size);
Hypothesis decide(double p);  // Accepted iff p <= .050

struct StatResult {
    double statistic = 0.0;  // standardised |z|
    double p_value = 1.0;
    Band band = Band::NS;
    double effect_size = 0.0;  // r = |z| / sqrt(N)
    Magnitude magnitude = Magnitude::Negligible;
    Hypothesis hypothesis = Hypothesis::Rejected;
    double cohens_d = 0.0;  // (mean_a - mean_b) / pooled sd, reported alongside r
    double rank_sum = 0.0;  // W: rank sum of group a (mid-ranks)
    bool exact = false;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

/// Largest |a|+|b| for which p comes from complete enumeration.
inline constexpr std::size_t kExactLimit = 12;

/// Wilcoxon rank-sum (Mann-Whitney) test with mid-ranks for ties. Exact p by
/// enumerating the rank-sum distribution when |a|+|b| <= 12, otherwise the
/// normal approximation with tie and continuity corrections. All-equal input
/// yields p = 1, z = 0. Throws EmptyGroup.
StatResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b,
                         Alternative alternative = Alternative::TwoSided);

double cohens_d(const std::vector<double>& a, const std::vector<double>& b);

// ---- descriptive helpers --------------------------------------------------

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // population (n) denominator
};

MeanSd mean_sd(const std::vector<double>& xs);

/// Half-up rounding to `digits` decimals, as used in the report tables.
double round_half_up(double x, int digits = 2);

/// Share of positions where two raters gave the same score.
double agreement_ratio(const std::vector<int>& rater_a, const std::vector<int>& rater_b);

// ---- emotion --------------------------------------------------------------

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double support_proportion = 0.0;
};

struct EmotionMetrics {
    std::map<EmotionLabel, ClassMetrics> per_class;  // always all three labels
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::size_t n = 0;
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);
double macro_average(const std::vector<double>& values);

/// (predicted, ground truth) pairs. Classes absent from both sides get F1 = 0
/// and still count toward the macro average. Throws EmptyInput.
EmotionMetrics emotion_metrics(const std::vector<std::pair<EmotionLabel, EmotionLabel>>& pairs);

/// Pairs (predicted emotion, confirmed emotion) from submitted memos.
std::vector<std::pair<EmotionLabel, EmotionLabel>> emotion_pairs(const std::vector<Memo>& memos);

// ---- hit ratio ------------------------------------------------------------

struct HitReport {
    Dimension dimension = Dimension::Location;
    std::vector<std::string> participants;           // sorted
    std::vector<double> per_participant_hit_ratio;  // aligned with participants
    double mean = 0.0;
    double sd = 0.0;
    /// Share of submissions by number of selected options: "0", "1", "2", ">2".
    std::map<std::string, double> option_count_proportions;
    std::size_t submissions = 0;
};

/// Hit iff the preselected option is among the final selections. Only
/// Location, People and Activity are valid. Throws EmptyInput,
/// UnsubmittedMemo or InvalidArgument.
HitReport hit_report(const std::vector<Memo>& memos, Dimension dimension);

// ---- recall rubric --------------------------------------------------------

enum class GroupBy { Arm, ArmAndGroup };

struct RubricCell {
    SystemArm arm = SystemArm::Baseline;
    std::optional<ParticipantGroup> group;
    std::size_t n = 0;
    std::array<MeanSd, 5> per_dimension{};  // indexed by Dimension
    MeanSd total;
};

/// Throws ScoreOutOfRange when any score is outside {0,1,2}, and
/// MissingGroupLabel when grouping by arm x group without a group.
std::vector<RubricCell> aggregate_rubric(const std::vector<RecallScoreSheet>& sheets, GroupBy group_by);

/// Scores for one dimension (nullopt = total) from sheets matching the filter.
std::vector<double> scores_of(const std::vector<RecallScoreSheet>& sheets, std::optional<Dimension> dimension,
                              std::optional<SystemArm> arm, std::optional<ParticipantGroup> group);

struct ComparisonRow {
    std::string dimension;  // "Time" .. "Activity", "Total"
    MeanSd first;
    MeanSd second;
    StatResult stat;
};

/// Agent vs Baseline per dimension and total (first = Baseline, second =
/// Agent; the test's group a is Agent).
std::vector<ComparisonRow> compare_arms(const std::vector<RecallScoreSheet>& sheets,
                                        Alternative alternative = Alternative::TwoSided);

/// For each arm, G1 vs G2 per dimension and total. Keys of the inner map are
/// dimension names plus "Total". Throws MissingGroupLabel.
std::map<SystemArm, std::vector<ComparisonRow>> carryover_check(const std::vector<RecallScoreSheet>& sheets,
                                                                Alternative alternative = Alternative::TwoSided);

// ---- descriptive ----------------------------------------------------------

struct DescriptiveStats {
    std::map<Modality, std::size_t> modality_counts;  // all five modalities present
    std::array<std::size_t, 24> hourly_histogram{};   // participant-local hour
    std::array<double, 7> daily_average_by_day{};     // entries per participant, study day 1..7
    std::size_t total = 0;
    std::size_t participants = 0;
    MeanSd entries_per_participant;
};

/// Study day d counts entries on the d-th local calendar day since the
/// participant's first entry (or since `study_start`, when given). Entries
/// after day 7 only count toward the totals.
DescriptiveStats descriptive_stats(const std::vector<DiaryEntry>& entries,
                                   std::optional<std::chrono::local_days> study_start = std::nullopt);

/// Keeps Text, TextAndImage and Audio entries (the modalities that carry
/// directly scorable text).
std::vector<DiaryEntry> rubric_eligible(const std::vector<DiaryEntry>& entries);

// ---- JSON -----------------------------------------------------------------

json to_json(const StatResult& r);
json to_json(const EmotionMetrics& m);
json to_json(const HitReport& h);
json to_json(const RubricCell& c);
json to_json(const ComparisonRow& row);
json to_json(const DescriptiveStats& d);

/// {"entry_id", "arm", "group", "scores": {"Time": 0..2, ...}}. Throws
/// InvalidArgument for unscored (null) dimensions or an unknown arm.
RecallScoreSheet score_sheet_from_json(const json& j);
json score_sheet_to_json(const RecallScoreSheet& s);

/// CSV with a header row naming entry_id, arm, group, time, location,
/// people, emotion, activity (any order, case-insensitive). Empty group cells
/// mean "no group". Throws InvalidArgument.
std::vector<RecallScoreSheet> score_sheets_from_csv(std::string_view csv);

}  // namespace cuediary::eval
