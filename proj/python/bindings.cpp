#include "cuediary/domain.hpp"
#include "cuediary/error.hpp"
#include "cuediary/evaluation.hpp"
#include "cuediary/memo.hpp"
#include "cuediary/predictor.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cuediary;

namespace {

eval::Alternative alternative_from(const std::string& s) {
    if (s == "two-sided") return eval::Alternative::TwoSided;
    if (s == "greater") return eval::Alternative::Greater;
    if (s == "less") return eval::Alternative::Less;
    throw Error(ErrorCode::InvalidArgument, "alternative must be two-sided, greater or less");
}

// Results cross the boundary as JSON text; the Python side decodes them.
std::string rank_sum(const std::vector<double>& a, const std::vector<double>& b, const std::string& alternative) {
    return eval::to_json(eval::rank_sum_test(a, b, alternative_from(alternative))).dump();
}

std::string emotions(const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<std::pair<EmotionLabel, EmotionLabel>> labelled;
    for (const auto& [pred, truth] : pairs) {
        labelled.emplace_back(emotion_from_string(pred), emotion_from_string(truth));
    }
    return eval::to_json(eval::emotion_metrics(labelled)).dump();
}

std::string parse(const std::string& raw) {
    const auto out = parse_and_validate(raw);
    json j{{"ok", out.ok()}, {"lenient_json", out.report.lenient_json}, {"repairs", out.report.repairs}};
    j["prediction"] = out.prediction ? prediction_to_json(*out.prediction) : json(nullptr);
    if (out.report.violation) {
        const auto& v = *out.report.violation;
        j["violation"] = {{"code", to_string(v.code)}, {"dimension", v.dimension}, {"value", v.offending_value}};
    } else {
        j["violation"] = nullptr;
    }
    return j.dump();
}

std::string hits(const std::string& memos_json, const std::string& dimension) {
    std::vector<Memo> memos;
    for (const auto& m : json::parse(memos_json)) memos.push_back(memo_from_json(m));
    const auto d = parse_dimension(dimension);
    if (!d) throw Error(ErrorCode::InvalidArgument, "unknown dimension " + dimension);
    return eval::to_json(eval::hit_report(memos, *d)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "cuediary evaluation and parsing core";

    static py::exception<Error> error(m, "CuediaryError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    m.def("rank_sum_test", &rank_sum, py::arg("a"), py::arg("b"), py::arg("alternative") = "two-sided");
    m.def("f1_score", &eval::f1_score, py::arg("precision"), py::arg("recall"));
    m.def("round_half_up", &eval::round_half_up, py::arg("x"), py::arg("digits") = 2);
    m.def("classify_band", [](double p) { return std::string(eval::to_string(eval::classify_band(p))); });
    m.def("classify_magnitude", [](double r) { return std::string(eval::to_string(eval::classify_magnitude(r))); });
    m.def("emotion_metrics", &emotions, py::arg("pairs"));
    m.def("parse_and_validate", &parse, py::arg("raw"));
    m.def("hit_report", &hits, py::arg("memos_json"), py::arg("dimension"));
}
