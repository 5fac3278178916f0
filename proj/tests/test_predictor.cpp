#include "cuediary/error.hpp"
#include "cuediary/predictor.hpp"

#include "local_server.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace cuediary;
using namespace std::chrono_literals;
using cuediary::testing::prediction_reply;
using cuediary::testing::ScriptedLlm;
using cuediary::testing::text_entry;

namespace {

LlmClientConfig fast_config(int retries = 2) {
    LlmClientConfig c;
    c.timeout = 50ms;
    c.max_retries = retries;
    return c;
}

std::string with_emotion(const std::string& label) {
    auto j = json::parse(prediction_reply());
    j["Emotion"] = label;
    return j.dump();
}

}  // namespace

TEST(Predictor, FirstGoodAnswerWins) {
    auto llm = std::make_shared<ScriptedLlm>();
    ContextPredictor p(llm, fast_config());
    const auto out = p.predict(text_entry("writing code at my desk"));
    EXPECT_FALSE(out.fallback);
    EXPECT_EQ(out.llm_calls, 1);
    EXPECT_EQ(out.prediction, cuediary::testing::sample_prediction());
    const auto reqs = llm->requests();
    ASSERT_EQ(reqs.size(), 1u);
    EXPECT_DOUBLE_EQ(reqs[0].temperature, 0.7);
    EXPECT_EQ(reqs[0].messages.size(), 1u);
    EXPECT_EQ(reqs[0].messages[0].content, build_prompt(text_entry("writing code at my desk")).rendered);
}

TEST(Predictor, RepromptsWithReminderAfterViolation) {
    auto llm = std::make_shared<ScriptedLlm>(std::vector<std::string>{with_emotion("Happy")});
    ContextPredictor p(llm, fast_config());
    const auto out = p.predict(text_entry("a good day"));
    EXPECT_FALSE(out.fallback);
    EXPECT_EQ(out.llm_calls, 2);
    const auto reqs = llm->requests();
    ASSERT_EQ(reqs.size(), 2u);
    ASSERT_EQ(reqs[1].messages.size(), 3u);
    EXPECT_EQ(reqs[1].messages[1].role, "assistant");
    EXPECT_EQ(reqs[1].messages[1].content, with_emotion("Happy"));
    EXPECT_TRUE(reqs[1].messages[2].content.starts_with(std::string(format_reminder())));
    EXPECT_NE(reqs[1].messages[2].content.find("'Happy' for Emotion"), std::string::npos);
}

TEST(Predictor, PersistentViolationFallsBackToManual) {
    auto llm = std::make_shared<ScriptedLlm>(std::vector<std::string>{}, with_emotion("Happy"));
    ContextPredictor p(llm, fast_config(2));
    const auto out = p.predict(text_entry("a good day"));
    EXPECT_TRUE(out.fallback);
    EXPECT_EQ(out.llm_calls, 3);
    EXPECT_EQ(out.fallback_reason, ErrorCode::MalformedOutput);
    EXPECT_EQ(out.prediction, ContextPrediction::manual_fallback());
    EXPECT_EQ(out.prediction.emotion(), EmotionLabel::Neutral);
}

TEST(Predictor, TimeoutsShareTheRetryBudget) {
    auto llm = std::make_shared<ScriptedLlm>(std::vector<std::string>{ScriptedLlm::kSleep, ScriptedLlm::kSleep});
    ContextPredictor p(llm, fast_config(2));
    const auto start = std::chrono::steady_clock::now();
    const auto out = p.predict(text_entry("a good day"));
    EXPECT_LT(std::chrono::steady_clock::now() - start, 2s);
    EXPECT_FALSE(out.fallback);
    EXPECT_EQ(out.llm_calls, 3);

    auto stuck = std::make_shared<ScriptedLlm>(std::vector<std::string>{}, ScriptedLlm::kSleep);
    ContextPredictor q(stuck, fast_config(1));
    const auto out2 = q.predict(text_entry("a good day"));
    EXPECT_TRUE(out2.fallback);
    EXPECT_EQ(out2.fallback_reason, ErrorCode::LlmTimeout);
    EXPECT_EQ(stuck->calls(), 2);
}

TEST(Predictor, NoUsableContentSkipsTheLlm) {
    auto llm = std::make_shared<ScriptedLlm>();
    ContextPredictor p(llm, fast_config());
    auto e = text_entry("");
    e.modality = Modality::Image;
    e.text_body.reset();
    const auto out = p.predict(e);
    EXPECT_TRUE(out.fallback);
    EXPECT_EQ(out.fallback_reason, ErrorCode::NoUsableContent);
    EXPECT_EQ(llm->calls(), 0);
}

TEST(Predictor, ConfigValidation) {
    auto llm = std::make_shared<ScriptedLlm>();
    auto c = fast_config();
    c.max_retries = -1;
    EXPECT_THROW(ContextPredictor(llm, c), Error);
    c = fast_config();
    c.temperature = 2.5;
    EXPECT_THROW(ContextPredictor(llm, c), Error);
    EXPECT_THROW(ContextPredictor(nullptr, fast_config()), Error);
}

TEST(HttpLlmClient, SpeaksChatCompletions) {
    cuediary::testing::LocalServer srv;
    json seen;
    std::string auth;
    srv.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "hi"}}}}}}}.dump(),
                        "application/json");
    });
    srv.server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices":[]})", "application/json");
    });
    srv.server.Post("/busy", [](const httplib::Request&, httplib::Response& res) { res.status = 504; });
    srv.server.Post("/denied", [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    srv.server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(400ms);
        res.set_content("{}", "application/json");
    });
    srv.start();

    auto client_for = [&](const std::string& path) {
        LlmClientConfig c;
        c.endpoint = srv.url(path);
        c.credentials = "k";
        return HttpLlmClient(c);
    };
    ChatRequest req{"gpt-3.5-turbo", 0.7, {{"user", "hello"}}};
    EXPECT_EQ(client_for("/v1/chat/completions").complete(req, 2s), "hi");
    EXPECT_EQ(seen.at("model"), "gpt-3.5-turbo");
    EXPECT_DOUBLE_EQ(seen.at("temperature").get<double>(), 0.7);
    EXPECT_EQ(seen.at("messages")[0].at("content"), "hello");
    EXPECT_EQ(auth, "Bearer k");

    auto code = [&](const std::string& path, std::chrono::milliseconds t) {
        try {
            client_for(path).complete(req, t);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code("/broken", 2s), ErrorCode::ProviderRejected);
    EXPECT_EQ(code("/busy", 2s), ErrorCode::LlmTimeout);
    EXPECT_EQ(code("/denied", 2s), ErrorCode::ProviderRejected);
    EXPECT_EQ(code("/slow", 100ms), ErrorCode::LlmTimeout);
}

TEST(KeywordLlmClient, AnswersAreValidAndTopical) {
    auto kw = std::make_shared<KeywordLlmClient>();
    ContextPredictor p(kw, fast_config(0));
    auto work = p.predict(text_entry("overtime again on the project, exhausted"));
    ASSERT_FALSE(work.fallback);
    EXPECT_EQ(work.prediction.people(), PeopleLabel::Colleagues);
    EXPECT_EQ(work.prediction.emotion(), EmotionLabel::Negative);

    auto family = p.predict(text_entry("dinner with my parents at home, so happy"));
    EXPECT_EQ(family.prediction.people(), PeopleLabel::Families);
    EXPECT_EQ(family.prediction.emotion(), EmotionLabel::Positive);

    auto plain = p.predict(text_entry("nothing much"));
    EXPECT_FALSE(plain.fallback);
    EXPECT_EQ(plain.prediction.emotion(), EmotionLabel::Neutral);
}
