#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <thread>

#include "support.hpp"
#include "tutor/demo_pack.hpp"
#include "tutor/error.hpp"
#include "tutor/event_codec.hpp"
#include "tutor/replay.hpp"
#include "tutor/tutor.hpp"

using namespace tutor;

namespace {

std::shared_ptr<TranslatorBackend> glossary_backend() {
  const auto file = parse_glossary(demo_glossary());
  return std::make_shared<GlossaryBackend>(file.entries, file.pairs);
}

class FailingBackend final : public TranslatorBackend {
 public:
  std::string_view name() const override { return "down"; }
  std::optional<std::set<LanguagePair>> capability() const override { return std::nullopt; }
  std::string translate(const TranslationRequest&) override {
    throw TutorError(ErrorCode::BackendUnavailable, "down");
  }
};

struct Fixture {
  explicit Fixture(std::shared_ptr<TranslatorBackend> backend = glossary_backend(), bool with_log = true)
      : dir(test::temp_dir()), backend(std::move(backend)) {
    if (with_log) config.event_log = dir / "events.ndjson";
    config.pbkdf2_iterations = 1;
    reopen();
  }

  void reopen() {
    tutor.reset();
    tutor = std::make_unique<Tutor>(demo_pack(), default_policy(), backend, config, [this] { return now += 1000; });
  }

  std::filesystem::path dir;
  std::shared_ptr<TranslatorBackend> backend;
  TutorConfig config;
  std::int64_t now = 1'700'000'000'000;
  std::unique_ptr<Tutor> tutor;
};

std::map<std::string, int> profile_answers(const ContentPack& pack, LearningStyle favourite) {
  std::map<std::string, int> r;
  for (const auto& item : pack.questionnaire) {
    const int raw = item.scale == favourite ? 5 : 1;
    r[item.item_id] = item.reverse_scored ? 6 - raw : raw;
  }
  return r;
}

std::map<std::string, int> answers_for(const ContentPack& pack, const Json& test, bool correct) {
  std::map<std::string, int> a;
  for (const auto& q : test.at("questions")) {
    const auto* question = pack.find_question(q.at("question_id").get<std::string>());
    const int n = static_cast<int>(question->choices.size());
    a[question->question_id] = correct ? question->correct_index : (question->correct_index + 1) % n;
  }
  return a;
}

ErrorCode error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const TutorError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::BadRequest;
}

// Registers and profiles a learner; returns its id.
std::string profiled(Tutor& t, const std::string& name, const std::string& language = "en",
                     LearningStyle style = LearningStyle::DeepLearningAchiever) {
  const auto id = t.register_learner(name, "pw", language);
  t.submit_questionnaire(id, profile_answers(t.pack(), style));
  return id;
}

const std::map<SessionPhase, std::set<SessionPhase>> kLegal = {
    {SessionPhase::NeedsProfile, {SessionPhase::AwaitingPreTest}},
    {SessionPhase::AwaitingPreTest, {SessionPhase::InLesson}},
    {SessionPhase::InLesson, {SessionPhase::AwaitingPostTest}},
    {SessionPhase::AwaitingPostTest, {SessionPhase::InLesson, SessionPhase::AwaitingPreTest, SessionPhase::Completed}},
    {SessionPhase::Completed, {}},
};

}  // namespace

TEST(Auth, RegisterLoginAndTokens) {
  Fixture f;
  auto& t = *f.tutor;
  const auto id = t.register_learner("ana", "secret", "fa");
  ASSERT_EQ(t.events(id).size(), 1u);
  EXPECT_EQ(std::get<Registered>(t.events(id)[0].payload).language, "fa");
  EXPECT_EQ(error_of([&] { t.register_learner("ana", "x", "en"); }), ErrorCode::NameTaken);
  EXPECT_EQ(error_of([&] { t.register_learner("bo", "x", "de"); }), ErrorCode::UnsupportedLanguage);
  EXPECT_EQ(error_of([&] { t.register_learner("bo", "x", "EN"); }), ErrorCode::UnsupportedLanguage);

  const auto token = t.login("ana", "secret");
  EXPECT_GE(token.size(), 32u);  // 128 bits, hex
  EXPECT_EQ(t.authenticate(token), id);
  EXPECT_NE(t.login("ana", "secret"), token);
  EXPECT_EQ(error_of([&] { t.login("ana", "nope"); }), ErrorCode::InvalidCredentials);
  EXPECT_EQ(error_of([&] { t.login("nobody", "secret"); }), ErrorCode::InvalidCredentials);
  EXPECT_EQ(error_of([&] { t.authenticate("forged"); }), ErrorCode::InvalidToken);
}

TEST(Auth, TokensExpire) {
  Fixture f;
  f.config.token_ttl = std::chrono::seconds(10);
  f.reopen();
  auto& t = *f.tutor;
  t.register_learner("ana", "secret", "en");
  const auto token = t.login("ana", "secret");
  EXPECT_NO_THROW(t.authenticate(token));
  f.now += 20'000;
  EXPECT_EQ(error_of([&] { t.authenticate(token); }), ErrorCode::InvalidToken);
}

TEST(Auth, CredentialsSurviveRestartAndAreNotPlaintext) {
  Fixture f;
  const auto id = f.tutor->register_learner("ana", "hunter2", "es");
  f.reopen();
  EXPECT_EQ(f.tutor->authenticate(f.tutor->login("ana", "hunter2")), id);
  EXPECT_EQ(f.tutor->state(id).language, "es");
  std::ifstream in(f.dir / "events.ndjson.auth");
  const std::string stored((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_FALSE(stored.empty());
  EXPECT_EQ(stored.find("hunter2"), std::string::npos);
}

TEST(Session, NewLearnerIsAskedForProfile) {
  Fixture f;
  auto& t = *f.tutor;
  const auto id = t.register_learner("ana", "pw", "fa");
  const auto step = t.next_step(id);
  EXPECT_EQ(step["kind"], "questionnaire");
  EXPECT_EQ(step["items"].size(), t.pack().questionnaire.size());
  EXPECT_EQ(t.questionnaire(id)["items"], step["items"]);
  EXPECT_EQ(t.events(id).size(), 1u);  // asking appends nothing
}

TEST(Session, QuestionnaireScoringThroughTheService) {
  Fixture f;
  auto& t = *f.tutor;
  const auto& pack = t.pack();
  const auto id = t.register_learner("ana", "pw", "en");
  EXPECT_EQ(t.submit_questionnaire(id, profile_answers(pack, LearningStyle::ConscientiousAchiever))["dominant"], "CA");

  std::map<std::string, int> flat;
  for (const auto& item : pack.questionnaire) flat[item.item_id] = 3;
  EXPECT_EQ(t.submit_questionnaire(id, flat)["dominant"], "SS");

  auto missing = flat;
  missing.erase(missing.begin());
  EXPECT_EQ(error_of([&] { t.submit_questionnaire(id, missing); }), ErrorCode::MissingResponse);
  auto bad = flat;
  bad.begin()->second = 6;
  EXPECT_EQ(error_of([&] { t.submit_questionnaire(id, bad); }), ErrorCode::InvalidLikert);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    std::map<std::string, int> r;
    for (const auto& item : pack.questionnaire) r[item.item_id] = 1 + static_cast<int>(rng() % 5);
    const auto direct = score_questionnaire(pack.questionnaire, r);
    const auto via = t.submit_questionnaire(id, r);
    ASSERT_EQ(via["style"], to_json(direct));
    ASSERT_EQ(via["dominant"], std::string(style_code(direct.dominant)));
    ASSERT_EQ(t.state(id).style, direct);
  }
}

TEST(Session, NextStepIsIdempotentUntilTheLearnerResponds) {
  Fixture f;
  auto& t = *f.tutor;
  const auto id = profiled(t, "ana");
  const auto first = t.next_step(id);
  EXPECT_EQ(first["kind"], "test");
  EXPECT_EQ(first["test"]["phase"], "pre");
  EXPECT_EQ(first["test"]["concept_id"], "c1-whole-numbers");
  const auto events = t.events(id).size();
  for (int i = 0; i < 3; ++i) EXPECT_EQ(t.next_step(id).dump(), first.dump());
  EXPECT_EQ(t.events(id).size(), events);

  t.submit_test(id, first["test"]["test_id"], answers_for(t.pack(), first["test"], true));
  const auto lesson = t.next_step(id);
  EXPECT_EQ(lesson["kind"], "lesson");
  EXPECT_EQ(t.next_step(id).dump(), lesson.dump());
}

TEST(Session, FullCycleAdvancesThroughTheCourse) {
  Fixture f;
  auto& t = *f.tutor;
  const auto& pack = t.pack();
  const auto id = profiled(t, "ana");

  auto pre = t.next_step(id)["test"];
  auto result = t.submit_test(id, pre["test_id"], answers_for(pack, pre, true));
  EXPECT_EQ(result["result"]["level"], "Excellent");
  EXPECT_EQ(result["session_phase"], "InLesson");
  EXPECT_TRUE(result["decision"].is_null());

  auto step = t.next_step(id);
  ASSERT_EQ(step["kind"], "lesson");
  EXPECT_EQ(step["lesson"]["style"], "DLA");
  EXPECT_EQ(step["phase"], "AwaitingPostTest");
  auto post = step["post_test"];
  EXPECT_EQ(post["phase"], "post");
  result = t.submit_test(id, post["test_id"], answers_for(pack, post, true));
  EXPECT_EQ(result["decision"]["decision"], "advance");
  EXPECT_EQ(result["session_phase"], "AwaitingPreTest");
  EXPECT_EQ(result["active_concept"], "c2-fractions");

  const auto next = t.next_step(id);
  EXPECT_EQ(next["test"]["phase"], "pre");
  EXPECT_EQ(next["test"]["concept_id"], "c2-fractions");

  // Finish the remaining concepts.
  for (int guard = 0; guard < 20; ++guard) {
    step = t.next_step(id);
    if (step["kind"] == "completed") break;
    const auto& test = step["kind"] == "test" ? step["test"] : step["post_test"];
    t.submit_test(id, test["test_id"], answers_for(pack, test, true));
  }
  EXPECT_EQ(step["kind"], "completed");
  EXPECT_EQ(t.next_step(id)["kind"], "completed");
  for (const auto& [concept_id, record] : t.state(id).mastery) {
    EXPECT_EQ(record.status, MasteryStatus::Mastered) << concept_id;
    EXPECT_EQ(record.attempts, 1);
    EXPECT_EQ(record.post_level, KnowledgeLevel::Excellent);
  }
}

TEST(Session, FailedPostTestRemediatesWithAnotherStyle) {
  Fixture f;
  auto& t = *f.tutor;
  const auto& pack = t.pack();
  const auto id = profiled(t, "ana");
  auto pre = t.next_step(id)["test"];
  t.submit_test(id, pre["test_id"], answers_for(pack, pre, true));
  auto step = t.next_step(id);
  const auto first_style = step["lesson"]["style"].get<std::string>();
  auto result = t.submit_test(id, step["post_test"]["test_id"], answers_for(pack, step["post_test"], false));
  EXPECT_EQ(result["result"]["level"], "Weak");
  EXPECT_EQ(result["decision"]["decision"], "remediate");
  EXPECT_EQ(result["decision"]["attempt_no"], 1);
  EXPECT_EQ(result["session_phase"], "InLesson");
  EXPECT_EQ(result["active_concept"], "c1-whole-numbers");
  const auto rotated = result["lesson_style"].get<std::string>();
  EXPECT_NE(rotated, first_style);
  EXPECT_EQ(rotated, style_code(remediation_style(pack, "c1-whole-numbers", *parse_style(first_style))));

  step = t.next_step(id);
  EXPECT_EQ(step["lesson"]["style"], rotated);
  EXPECT_EQ(step["post_test"]["concept_id"], "c1-whole-numbers");
  EXPECT_NE(step["post_test"]["test_id"], result["test_id"]);
  EXPECT_EQ(t.state(id).mastery.at("c1-whole-numbers").attempts, 1);
  EXPECT_EQ(t.state(id).mastery.at("c1-whole-numbers").status, MasteryStatus::InProgress);
}

TEST(Session, TestsAreSingleUseAndBoundToThePhase) {
  Fixture f;
  auto& t = *f.tutor;
  const auto& pack = t.pack();
  const auto id = profiled(t, "ana");
  EXPECT_EQ(error_of([&] { t.submit_test(id, "c1-whole-numbers-pre-0000000000000001", {}); }),
            ErrorCode::UnknownTest);
  auto pre = t.next_step(id)["test"];
  auto answers = answers_for(pack, pre, true);
  auto partial = answers;
  partial.erase(partial.begin());
  EXPECT_EQ(error_of([&] { t.submit_test(id, pre["test_id"], partial); }), ErrorCode::MissingAnswer);
  auto extra = answers;
  extra["c3-decimals-q01"] = 0;
  EXPECT_EQ(error_of([&] { t.submit_test(id, pre["test_id"], extra); }), ErrorCode::UnknownQuestion);
  const auto before = t.events(id).size();
  t.submit_test(id, pre["test_id"], answers);
  EXPECT_EQ(t.events(id).size(), before + pre["questions"].size() + 1);
  EXPECT_EQ(error_of([&] { t.submit_test(id, pre["test_id"], answers); }), ErrorCode::WrongPhase);
}

TEST(Session, PhaseTransitionsFollowTheLegalGraph) {
  std::mt19937_64 rng(8);
  for (int learner = 0; learner < 12; ++learner) {
    Fixture f(glossary_backend(), false);
    auto& t = *f.tutor;
    const auto& pack = t.pack();
    const auto id = t.register_learner("l" + std::to_string(learner), "pw", "en");
    auto phase = [&] { return t.state(id).current_session ? t.state(id).current_session->phase : SessionPhase::NeedsProfile; };
    auto last = phase();
    auto observe = [&] {
      const auto now = phase();
      if (now != last) ASSERT_TRUE(kLegal.at(last).contains(now)) << session_phase_name(last) << "->" << session_phase_name(now);
      last = now;
    };
    const double ability = learner / 11.0;
    for (int guard = 0; guard < 400 && last != SessionPhase::Completed; ++guard) {
      const auto step = t.next_step(id);
      observe();
      const auto kind = step["kind"].get<std::string>();
      if (kind == "questionnaire") {
        t.submit_questionnaire(id, profile_answers(pack, kAllStyles[rng() % 5]));
      } else if (kind == "test" || kind == "lesson") {
        const auto& test = kind == "test" ? step["test"] : step["post_test"];
        std::bernoulli_distribution right(ability);
        auto answers = answers_for(pack, test, true);
        for (auto& [qid, choice] : answers) {
          if (!right(rng)) choice = (choice + 1) % static_cast<int>(pack.find_question(qid)->choices.size());
        }
        t.submit_test(id, test["test_id"], answers);
      }
      observe();
    }
    // Whatever happened must replay cleanly.
    const auto report = verify_events(t.events(id), f.config.model);
    ASSERT_TRUE(report.ok()) << report.violation->message;
  }
}

TEST(Session, CrashRecoveryRebuildsFromTheLog) {
  Fixture f;
  const auto& pack = f.tutor->pack();
  const auto id = profiled(*f.tutor, "ana", "fa");
  auto pre = f.tutor->next_step(id)["test"];
  f.tutor->submit_test(id, pre["test_id"], answers_for(pack, pre, true));
  const auto pending = f.tutor->next_step(id);
  const auto state = f.tutor->state(id);
  const auto progress = f.tutor->progress(id);

  f.reopen();  // simulated crash: nothing but the files survive
  auto& t = *f.tutor;
  EXPECT_EQ(t.state(id), state);
  EXPECT_EQ(t.progress(id), progress);
  EXPECT_EQ(t.next_step(id).dump(), pending.dump());
  const auto result = t.submit_test(id, pending["post_test"]["test_id"], answers_for(pack, pending["post_test"], true));
  EXPECT_EQ(result["decision"]["decision"], "advance");
  EXPECT_EQ(error_of([&] { t.submit_test(id, pre["test_id"], answers_for(pack, pre, true)); }), ErrorCode::WrongPhase);

  const auto log = read_event_log(f.dir / "events.ndjson");
  EXPECT_EQ(log, t.events(id));
  EXPECT_EQ(canonical_state(rebuild(log, f.config.model)), canonical_state(t.state(id)));
}

TEST(Session, RegisterThenRebuildKeepsLanguage) {
  Fixture f;
  const auto id = f.tutor->register_learner("ana", "pw", "fa");
  const auto log = read_event_log(f.dir / "events.ndjson");
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(rebuild(log).language, "fa");
  EXPECT_EQ(rebuild(log).learner_id, id);
}

TEST(Progress, FreshAndAfterMastery) {
  Fixture f;
  auto& t = *f.tutor;
  const auto& pack = t.pack();
  const auto id = t.register_learner("ana", "pw", "en");
  auto fresh = t.progress(id);
  ASSERT_EQ(fresh["concepts"].size(), 3u);
  for (const auto& c : fresh["concepts"]) EXPECT_EQ(c["status"], "NotStarted");

  t.submit_questionnaire(id, profile_answers(pack, LearningStyle::SensationSeeking));
  auto pre = t.next_step(id)["test"];
  t.submit_test(id, pre["test_id"], answers_for(pack, pre, false));
  auto post = t.next_step(id)["post_test"];
  t.submit_test(id, post["test_id"], answers_for(pack, post, true));

  const auto report = t.progress(id);
  const auto& c1 = report["concepts"][0];
  EXPECT_EQ(c1["concept_id"], "c1-whole-numbers");
  EXPECT_EQ(c1["status"], "Mastered");
  EXPECT_EQ(c1["pre_level"], "Weak");
  EXPECT_EQ(c1["post_level"], "Excellent");
  EXPECT_EQ(c1["attempts"], 1);
  EXPECT_EQ(report["concepts"][1]["status"], "NotStarted");
  EXPECT_EQ(report["session"]["phase"], "AwaitingPreTest");
  EXPECT_EQ(report["style"]["dominant"], "SS");

  // The report is a function of the log alone.
  Fixture other(glossary_backend(), false);
  other.config.event_log = f.dir / "events.ndjson";
  other.reopen();
  EXPECT_EQ(other.tutor->progress(id), report);
}

TEST(Translation, OutboundContentIsTranslated) {
  Fixture f;
  auto& t = *f.tutor;
  const auto id = profiled(t, "ana", "fa");
  const auto step = t.next_step(id);
  EXPECT_FALSE(step["untranslated"].get<bool>());
  bool saw_persian = false;
  for (const auto& q : step["test"]["questions"]) {
    if (q["stem"].get<std::string>().find("چیست") != std::string::npos) saw_persian = true;
  }
  EXPECT_TRUE(saw_persian);
}

TEST(Translation, OutageFallsBackToSourceText) {
  Fixture f(std::make_shared<FailingBackend>());
  auto& t = *f.tutor;
  const auto& pack = t.pack();
  const auto id = t.register_learner("ana", "pw", "de");
  const auto q = t.next_step(id);
  EXPECT_TRUE(q["untranslated"].get<bool>());
  for (std::size_t i = 0; i < pack.questionnaire.size(); ++i) {
    EXPECT_EQ(q["items"][i]["prompt"], pack.questionnaire[i].prompt.at("en"));
  }
  t.submit_questionnaire(id, profile_answers(pack, LearningStyle::GoalOrientedAchiever));
  const auto test = t.next_step(id);
  EXPECT_TRUE(test["untranslated"].get<bool>());
  for (const auto& item : test["test"]["questions"]) {
    const auto* question = pack.find_question(item["question_id"]);
    EXPECT_EQ(item["stem"], question->stem.at("en"));
    for (std::size_t c = 0; c < question->choices.size(); ++c) {
      EXPECT_EQ(item["choices"][c], question->choices[c].at("en"));
    }
  }

  try {
    t.chat_translate(id, "en", "hallo");
    FAIL();
  } catch (const TutorError& e) {
    EXPECT_EQ(e.code(), ErrorCode::BackendUnavailable);
    EXPECT_TRUE(e.retryable());
  }
}

TEST(Chat, TranslatesBetweenLearnerLanguages) {
  Fixture f;
  auto& t = *f.tutor;
  const auto en = t.register_learner("ana", "pw", "en");
  const auto fa = t.register_learner("bo", "pw", "fa");
  EXPECT_EQ(t.chat_translate(en, "en", "hello there"), "hello there");
  EXPECT_EQ(t.chat_translate(en, "fa", "the book"), "the کتاب");
  EXPECT_EQ(t.chat_translate(fa, "en", "کتاب"), "book");
  EXPECT_EQ(error_of([&] { t.chat_translate(en, "xx", "book"); }), ErrorCode::UnsupportedPair);
  EXPECT_EQ(error_of([&] { t.chat_translate(en, "Farsi", "book"); }), ErrorCode::InvalidLanguage);
  const auto before = t.events(en).size();
  t.chat_translate(en, "fa", "book");
  EXPECT_EQ(t.events(en).size(), before);  // chat is never persisted
}

TEST(Concurrency, LearnersProceedInParallel) {
  Fixture f;
  auto& t = *f.tutor;
  const auto& pack = t.pack();
  std::vector<std::string> ids;
  for (int i = 0; i < 6; ++i) ids.push_back(profiled(t, "p" + std::to_string(i), i % 2 ? "fa" : "en"));
  std::vector<std::thread> threads;
  std::atomic<int> completed{0};
  for (const auto& id : ids) {
    threads.emplace_back([&, id] {
      for (int guard = 0; guard < 50; ++guard) {
        const auto step = t.next_step(id);
        if (step["kind"] == "completed") {
          ++completed;
          return;
        }
        const auto& test = step["kind"] == "test" ? step["test"] : step["post_test"];
        t.submit_test(id, test["test_id"], answers_for(pack, test, true));
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(completed, 6);

  const auto log = read_event_log(f.dir / "events.ndjson");
  const auto report = verify_events(log, f.config.model);
  ASSERT_TRUE(report.ok());
  for (const auto& id : ids) EXPECT_EQ(report.states.at(id), canonical_state(t.state(id)));
}

TEST(Facts, NextUnmasteredFollowsPrerequisites) {
  const auto pack = demo_pack();
  LearnerState st;
  EXPECT_EQ(next_unmastered_concept(st, pack), "c1-whole-numbers");
  st.mastery["c1-whole-numbers"].status = MasteryStatus::Mastered;
  EXPECT_EQ(next_unmastered_concept(st, pack), "c2-fractions");
  st.mastery["c2-fractions"].status = MasteryStatus::Mastered;
  st.mastery["c3-decimals"].status = MasteryStatus::Mastered;
  EXPECT_EQ(next_unmastered_concept(st, pack), std::nullopt);
}

TEST(Facts, RemediationStyleWalksTheFallbackChain) {
  const auto pack = demo_pack();
  // c3 has DLA and GOA variants only.
  EXPECT_EQ(remediation_style(pack, "c3-decimals", LearningStyle::DeepLearningAchiever),
            LearningStyle::GoalOrientedAchiever);
  const auto back = remediation_style(pack, "c3-decimals", LearningStyle::GoalOrientedAchiever);
  EXPECT_EQ(back, LearningStyle::DeepLearningAchiever);
}
