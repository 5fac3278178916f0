#include "cuediary/error.hpp"
#include "cuediary/predictor.hpp"
#include "cuediary/text.hpp"

#include <fmt/format.h>

namespace cuediary {

namespace {

constexpr std::string_view kPreamble =
    "You are an experienced diary study researcher.\n"
    "You are conducting a diary study right now, and when you receive the data captured by the "
    "participant, you need to help the participant to record some contextual information.\n"
    "These contextual information will be used as the cues for the participant to recall the event.\n"
    "In this way, we could collect more useful and abundant information from the participant in the "
    "interview after the logging period.\n";

constexpr std::string_view kInstructions =
    "Please predict the following contextual information based on the aforementioned information:\n"
    "\n"
    "Location: predict three possible point of interest locations, you could use the point of interest "
    "location categories in Google Maps or some other location-based service apps.\n"
    "\n"
    "Emotion: select only one from these three categories, Positive, Neutral and Negative, please keep "
    "the same spelling.\n"
    "\n"
    "People: select only one from these five categories, Alone, Families, Friends, Colleagues and "
    "Acquaintances, please keep the same spelling.\n"
    "\n"
    "Activity: give six descriptions of the six possible activities in this scenario (give more details "
    "for each activity, but each description should be less than 151 characters).\n"
    "\n"
    "Finally please output these information in English in valid JSON format. And the value for the "
    "Location and Activity should be a list of three and six elements respectively.\n"
    "\n"
    "EXAMPLE: {\"Location\": [Library, Workspace, Meeting room], \"Emotion\": Positive, \"People\": "
    "Colleague, \"Activity\": [Working on laptop and taking notes, Studying or doing research, Planning "
    "or organizing tasks for the day, Preparing a meeting, Watching a academic seminar, Discussing the "
    "current project]}\n";

constexpr std::string_view kReminder =
    "Your previous answer could not be used. Reply with one valid JSON object only, with exactly these "
    "keys: \"Location\" (a list of three strings), \"Emotion\" (one of Positive, Neutral, Negative), "
    "\"People\" (one of Alone, Families, Friends, Colleagues, Acquaintances) and \"Activity\" (a list of "
    "six different strings, each shorter than 151 characters). Quote every string.";

std::string tag_list(const ExtractedFeatures& f) {
    std::string out;
    for (std::size_t i = 0; i < f.object_tags.size(); ++i) {
        if (i) out += ", ";
        out += f.object_tags[i].label;
    }
    return out;
}

bool has_text(const std::optional<std::string>& s) {
    return s && !text::trim(*s).empty();
}

// Object and description lines for visual media; empty when nothing was extracted.
std::string visual_lines(const std::optional<ExtractedFeatures>& features, std::string_view noun) {
    if (!features) return {};
    ExtractedFeatures f = *features;
    f.sort_tags();
    std::string out;
    if (!f.object_tags.empty()) {
        out += fmt::format("The objects detected in this {} are {} (ranked by the decreasing order of confidence).\n",
                           noun, tag_list(f));
    }
    if (has_text(f.caption)) out += fmt::format("The description of this {} is {}.\n", noun, *f.caption);
    return out;
}

std::string content_for(const DiaryEntry& entry) {
    const auto& f = entry.features;
    switch (entry.modality) {
        case Modality::Text:
            if (!has_text(entry.text_body)) return {};
            return "Now, in the logging period, one participant write one text message as one diary entry.\n"
                   "The content of this text message is: " +
                   *entry.text_body + "\n";
        case Modality::Audio:
            if (!f || !has_text(f->transcript)) return {};
            return "Now, in the logging period, one participant record one audio clip as one diary entry.\n"
                   "The transcript of this audio clip is: " +
                   *f->transcript + "\n";
        case Modality::Image: {
            const auto lines = visual_lines(f, "image");
            if (lines.empty()) return {};
            return "Now, in the logging period, one participant capture one image as one diary entry.\n" + lines;
        }
        case Modality::Video: {
            const auto lines = visual_lines(f, "video clip");
            if (lines.empty()) return {};
            return "Now, in the logging period, one participant capture one video clip as one diary entry.\n" +
                   lines;
        }
        case Modality::TextAndImage: {
            const auto lines = visual_lines(f, "image");
            if (!has_text(entry.text_body) && lines.empty()) return {};
            std::string out =
                "Now, in the logging period, one participant capture one image with a text message as one "
                "diary entry.\n";
            if (has_text(entry.text_body)) out += "The content of this text message is: " + *entry.text_body + "\n";
            return out + lines;
        }
    }
    return {};
}

}  // namespace

PromptBundle build_prompt(const DiaryEntry& entry) {
    PromptBundle p;
    p.system_preamble = std::string(kPreamble);
    p.content_section = content_for(entry);
    if (p.content_section.empty()) {
        throw Error(ErrorCode::NoUsableContent,
                    fmt::format("entry {} has no text and no extracted features", entry.entry_id));
    }
    p.instruction_section = std::string(kInstructions);
    p.rendered = p.system_preamble + p.content_section + p.instruction_section;
    p.temperature = kDefaultTemperature;
    return p;
}

std::string_view format_reminder() {
    return kReminder;
}

}  // namespace cuediary
