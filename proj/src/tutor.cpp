#include "tutor/tutor.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <fstream>

#include "tutor/error.hpp"
#include "tutor/event_codec.hpp"

namespace tutor {

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

namespace {

std::string to_hex(const unsigned char* data, std::size_t size) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(size * 2);
  for (std::size_t i = 0; i < size; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xF]);
  }
  return out;
}

std::vector<unsigned char> from_hex(const std::string& hex) {
  std::vector<unsigned char> out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<unsigned char>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

std::string random_hex(std::size_t bytes) {
  std::vector<unsigned char> buffer(bytes);
  if (RAND_bytes(buffer.data(), static_cast<int>(bytes)) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
  return to_hex(buffer.data(), bytes);
}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr);
  return to_hex(digest, length);
}

std::string pbkdf2_hex(const std::string& password, const std::string& salt_hex, int iterations) {
  const auto salt = from_hex(salt_hex);
  unsigned char out[32];
  PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(), static_cast<int>(salt.size()),
                    iterations, EVP_sha256(), sizeof out, out);
  return to_hex(out, sizeof out);
}

// FNV-1a, stable across platforms and standard libraries.
std::uint64_t fnv1a(std::string_view data, std::uint64_t hash = 1469598103934665603ULL) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string phase_fact(const std::optional<SessionState>& session) {
  if (!session) return "unregistered";
  switch (session->phase) {
    case SessionPhase::NeedsProfile: return "needs_profile";
    case SessionPhase::AwaitingPreTest: return "awaiting_pretest";
    case SessionPhase::InLesson: return "in_lesson";
    case SessionPhase::AwaitingPostTest: return "awaiting_posttest";
    case SessionPhase::Completed: return "completed";
  }
  return "unknown";
}

Json level_json(const std::optional<KnowledgeLevel>& level) {
  return level ? Json(level_name(*level)) : Json(nullptr);
}

}  // namespace

// ---------------------------------------------------------------------------
// Facts for the expert rules
// ---------------------------------------------------------------------------

std::optional<std::string> next_unmastered_concept(const LearnerState& state, const ContentPack& pack) {
  for (const auto& id : prerequisite_order(pack)) {
    auto it = state.mastery.find(id);
    if (it == state.mastery.end() || it->second.status != MasteryStatus::Mastered) return id;
  }
  return std::nullopt;
}

LearningStyle remediation_style(const ContentPack& pack, const std::string& concept_id, LearningStyle current) {
  LearningStyle delivered = current;
  try {
    delivered = variant_for(pack, concept_id, current).style;
  } catch (const TutorError&) {
    return current;
  }
  LearningStyle candidate = delivered;
  for (std::size_t i = 0; i + 1 < kStyleFallbackChain.size(); ++i) {
    candidate = next_in_fallback_chain(candidate);
    if (has_variant(pack, concept_id, candidate)) return candidate;
  }
  return delivered;
}

WorkingMemory session_facts(const LearnerState& state, const ContentPack& pack) {
  WorkingMemory m;
  m.assert_fact("learner", "profiled", state.style.has_value());
  if (state.style) m.assert_fact("learner", "dominant_style", state.style->dominant);
  m.assert_fact("session", "phase", phase_fact(state.current_session));

  const auto next = next_unmastered_concept(state, pack);
  m.assert_fact("course", "next_concept", next.value_or(""));
  m.assert_fact("course", "all_mastered", !next.has_value());

  if (!state.current_session) return m;
  const auto& s = *state.current_session;
  m.assert_fact("session", "concept", s.active_concept.value_or(""));
  m.assert_fact("session", "test_pending", s.pending_test.has_value());
  m.assert_fact("session", "lesson_delivered", s.lesson_delivered);
  if (s.lesson_style) m.assert_fact("session", "lesson_style", *s.lesson_style);
  std::string decision = "none";
  if (s.last_decision) decision = s.last_decision->decision == Decision::Advance ? "advance" : "remediate";
  m.assert_fact("session", "decision", decision);
  m.assert_fact("session", "attempt_no", std::int64_t{s.last_decision ? s.last_decision->attempt_no : 0});

  if (!s.active_concept) return m;
  const auto& concept_id = *s.active_concept;
  MasteryRecord record;
  if (auto it = state.mastery.find(concept_id); it != state.mastery.end()) record = it->second;
  m.assert_fact("concept", "status", std::string(status_name(record.status)));
  m.assert_fact("concept", "attempts", std::int64_t{record.attempts});
  if (record.pre_level) m.assert_fact("concept", "pre_level", *record.pre_level);
  if (record.post_level) m.assert_fact("concept", "post_level", *record.post_level);
  if (record.conceptual_level) m.assert_fact("concept", "conceptual_level", *record.conceptual_level);
  if (record.objective_level) m.assert_fact("concept", "objective_level", *record.objective_level);
  const auto current = s.lesson_style.value_or(state.style ? state.style->dominant : LearningStyle::SensationSeeking);
  m.assert_fact("concept", "remediation_style", remediation_style(pack, concept_id, current));
  return m;
}

// ---------------------------------------------------------------------------
// Tutor internals
// ---------------------------------------------------------------------------

struct Tutor::Slot {
  std::mutex mutex;
  LearnerState state;
  std::vector<LearnerEvent> events;
  std::set<std::string> issued_tests;
};

/// Events applied to a private copy of the learner state; nothing is visible
/// or persisted until Tutor::commit.
class Tutor::Transaction {
 public:
  Transaction(const LearnerState& base, std::string learner_id, const ModelConfig& model, const Clock& clock)
      : state(base), learner_id_(std::move(learner_id)), model_(model), clock_(clock) {}

  void append(EventPayload payload) {
    LearnerEvent event{state.last_sequence + 1, learner_id_, clock_(), std::move(payload)};
    state = apply_event(std::move(state), event, model_);
    events.push_back(std::move(event));
  }

  const SessionState& session() const {
    if (!state.current_session) throw TutorError(ErrorCode::WrongPhase, learner_id_, "not registered");
    return *state.current_session;
  }

  LearnerState state;
  std::vector<LearnerEvent> events;

 private:
  std::string learner_id_;
  const ModelConfig& model_;
  const Clock& clock_;
};

Tutor::Tutor(ContentPack pack, RuleSet rules, std::shared_ptr<TranslatorBackend> backend, TutorConfig config,
             Clock clock)
    : pack_(std::move(pack)),
      rules_(std::move(rules)),
      backend_(std::move(backend)),
      config_(std::move(config)),
      clock_(std::move(clock)),
      cache_(config_.cache_entries) {
  if (!backend_) backend_ = std::make_shared<IdentityBackend>();
  if (config_.event_log && !config_.credentials) {
    config_.credentials = config_.event_log->string() + ".auth";
  }
  load_existing();
}

Tutor::~Tutor() = default;

void Tutor::load_existing() {
  if (config_.credentials && std::filesystem::exists(*config_.credentials)) {
    std::ifstream in(*config_.credentials);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = Json::parse(line);
      credentials_[j.at("name").get<std::string>()] =
          Credential{j.at("learner_id").get<std::string>(), j.at("salt").get<std::string>(),
                     j.at("hash").get<std::string>(), j.at("iterations").get<int>()};
    }
  }
  if (config_.event_log && std::filesystem::exists(*config_.event_log)) {
    for (auto& event : read_event_log(*config_.event_log)) {
      auto& s = slots_[event.learner_id];
      if (!s) s = std::make_unique<Slot>();
      s->state = apply_event(std::move(s->state), event, config_.model);
      if (const auto* issued = std::get_if<TestIssued>(&event.payload)) {
        s->issued_tests.insert(issued->instance.test_id);
      }
      if (config_.keep_events) s->events.push_back(std::move(event));
    }
  }
}

Tutor::Slot& Tutor::slot(const std::string& learner_id) const {
  std::shared_lock lock(registry_mutex_);
  auto it = slots_.find(learner_id);
  if (it == slots_.end()) throw TutorError(ErrorCode::InvalidToken, learner_id, "unknown learner");
  return *it->second;
}

void Tutor::commit(Slot& slot, Transaction& tx) {
  if (tx.events.empty()) return;
  if (config_.event_log) {
    std::string lines;
    for (const auto& e : tx.events) lines += encode_event(e) + '\n';
    std::lock_guard lock(file_mutex_);
    std::ofstream out(*config_.event_log, std::ios::app | std::ios::binary);
    out << lines;
    out.flush();
    if (!out) throw TutorError(ErrorCode::MalformedFile, config_.event_log->string(), "append failed");
  }
  for (const auto& e : tx.events) {
    if (const auto* issued = std::get_if<TestIssued>(&e.payload)) slot.issued_tests.insert(issued->instance.test_id);
  }
  slot.state = std::move(tx.state);
  if (config_.keep_events) {
    slot.events.insert(slot.events.end(), std::make_move_iterator(tx.events.begin()),
                       std::make_move_iterator(tx.events.end()));
  }
  tx.events.clear();
}

bool Tutor::language_supported(const std::string& language) const {
  if (!is_language_code(language)) return false;
  if (language == pack_.default_language) return true;
  const auto pairs = backend_->capability();
  if (!pairs) return true;
  return pairs->contains({pack_.default_language, language});
}

// ---------------------------------------------------------------------------
// Authentication
// ---------------------------------------------------------------------------

std::string Tutor::register_learner(const std::string& name, const std::string& password,
                                    const std::string& language) {
  if (name.empty() || password.empty()) throw TutorError(ErrorCode::BadRequest, "name/password", "must be non-empty");
  if (!language_supported(language)) throw TutorError(ErrorCode::UnsupportedLanguage, language);

  std::unique_lock lock(registry_mutex_);
  if (credentials_.contains(name)) throw TutorError(ErrorCode::NameTaken, name);
  std::string learner_id = "u" + sha256_hex(name).substr(0, 16);
  for (int suffix = 2; slots_.contains(learner_id); ++suffix) {
    learner_id = "u" + sha256_hex(name).substr(0, 16) + "-" + std::to_string(suffix);
  }

  Credential credential{learner_id, random_hex(16), {}, config_.pbkdf2_iterations};
  credential.hash_hex = pbkdf2_hex(password, credential.salt_hex, credential.iterations);

  auto fresh = std::make_unique<Slot>();
  Transaction tx(fresh->state, learner_id, config_.model, clock_);
  tx.append(Registered{language});
  if (config_.credentials) {
    std::lock_guard file_lock(file_mutex_);
    std::ofstream out(*config_.credentials, std::ios::app);
    out << Json{{"name", name},
                {"learner_id", learner_id},
                {"salt", credential.salt_hex},
                {"hash", credential.hash_hex},
                {"iterations", credential.iterations}}
               .dump()
        << '\n';
  }
  commit(*fresh, tx);
  slots_.emplace(learner_id, std::move(fresh));
  credentials_.emplace(name, std::move(credential));
  return learner_id;
}

std::string Tutor::login(const std::string& name, const std::string& password) {
  Credential credential;
  {
    std::shared_lock lock(registry_mutex_);
    auto it = credentials_.find(name);
    if (it == credentials_.end()) throw TutorError(ErrorCode::InvalidCredentials, name);
    credential = it->second;
  }
  const auto hash = pbkdf2_hex(password, credential.salt_hex, credential.iterations);
  if (hash.size() != credential.hash_hex.size() ||
      CRYPTO_memcmp(hash.data(), credential.hash_hex.data(), hash.size()) != 0) {
    throw TutorError(ErrorCode::InvalidCredentials, name);
  }
  const auto now = clock_();
  auto token = random_hex(32);
  std::lock_guard lock(session_mutex_);
  sessions_[token] = ApiSession{credential.learner_id, now,
                                now + std::chrono::duration_cast<std::chrono::milliseconds>(config_.token_ttl).count()};
  return token;
}

std::string Tutor::authenticate(const std::string& token) const {
  std::lock_guard lock(session_mutex_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) throw TutorError(ErrorCode::InvalidToken, "token");
  if (clock_() >= it->second.expires_at) throw TutorError(ErrorCode::InvalidToken, "token", "expired");
  return it->second.learner_id;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

std::string Tutor::render(const LocalizedText& text, const std::string& language, bool& untranslated) {
  if (auto it = text.find(language); it != text.end()) return it->second;
  auto source = text.find(pack_.default_language);
  if (source == text.end()) source = text.begin();
  if (source == text.end()) return {};
  return render_block(ContentBlock{source->first, source->second}, language, untranslated);
}

std::string Tutor::render_block(const ContentBlock& block, const std::string& language, bool& untranslated) {
  try {
    return cached_translate(cache_, *backend_, TranslationRequest{block.language, language, block.text});
  } catch (const TutorError& e) {
    switch (e.code()) {
      case ErrorCode::BackendUnavailable:
      case ErrorCode::UnsupportedPair:
      case ErrorCode::TextTooLong:
      case ErrorCode::AuthFailure:
      case ErrorCode::BadRequest:
        untranslated = true;
        return block.text;
      default:
        throw;
    }
  }
}

Json Tutor::test_payload(const TestInstance& instance, const std::string& language, bool& untranslated) {
  Json questions = Json::array();
  for (const auto& qid : instance.question_ids) {
    const Question* q = pack_.find_question(qid);
    if (q == nullptr) throw TutorError(ErrorCode::ContentUnavailable, qid);
    Json choices = Json::array();
    for (const auto& c : q->choices) choices.push_back(render(c, language, untranslated));
    questions.push_back({{"question_id", q->question_id},
                         {"section_id", q->section_id},
                         {"level", level_name(q->level)},
                         {"stem", render(q->stem, language, untranslated)},
                         {"choices", choices}});
  }
  return {{"test_id", instance.test_id},
          {"phase", phase_name(instance.phase)},
          {"concept_id", instance.concept_id},
          {"reset_occurred", instance.reset_occurred},
          {"questions", questions}};
}

Json Tutor::lesson_payload(const std::string& concept_id, LearningStyle style, const std::string& language,
                           bool& untranslated) {
  const Concept* c = pack_.find_concept(concept_id);
  if (c == nullptr) throw TutorError(ErrorCode::ContentUnavailable, concept_id);
  const LessonVariant* variant = nullptr;
  try {
    variant = &variant_for(pack_, concept_id, style);
  } catch (const TutorError& e) {
    throw TutorError(ErrorCode::ContentUnavailable, concept_id, e.what());
  }
  Json blocks = Json::array();
  for (const auto& block : variant->body) {
    blocks.push_back({{"language", language}, {"text", render_block(block, language, untranslated)}});
  }
  return {{"concept_id", concept_id},
          {"title", render(c->title, language, untranslated)},
          {"style", style_code(variant->style)},
          {"blocks", blocks}};
}

TestInstance Tutor::issue_test(const LearnerState& state, const std::string& concept_id, TestPhase phase,
                               KnowledgeLevel level) {
  const Concept* c = pack_.find_concept(concept_id);
  if (c == nullptr) throw TutorError(ErrorCode::ContentUnavailable, concept_id);
  const auto bank = bank_for(pack_, concept_id);
  if (bank.empty()) throw TutorError(ErrorCode::ContentUnavailable, concept_id, "empty question bank");

  TestSpec spec;
  spec.concept_id = concept_id;
  spec.phase = phase;
  spec.question_count = default_question_count(c->sections.size(), bank.size());
  spec.learner_level = level;
  spec.style = state.style ? state.style->dominant : LearningStyle::SensationSeeking;
  std::uint64_t seed = fnv1a(std::to_string(config_.seed_salt));
  seed = fnv1a(state.learner_id, seed);
  seed = fnv1a(std::to_string(state.last_sequence + 1), seed);
  spec.rng_seed = seed;

  static const std::set<std::string> kNone;
  auto seen = state.seen_questions.find(concept_id);
  auto instance = select_questions(bank, spec, seen == state.seen_questions.end() ? kNone : seen->second);
  instance.issued_at = clock_();
  return instance;
}

// ---------------------------------------------------------------------------
// Learner operations
// ---------------------------------------------------------------------------

Json Tutor::questionnaire(const std::string& learner_id) { return questionnaire_payload(state(learner_id).language); }

Json Tutor::questionnaire_payload(const std::string& language) {
  bool untranslated = false;
  Json items = Json::array();
  for (const auto& item : pack_.questionnaire) {
    items.push_back({{"item_id", item.item_id}, {"prompt", render(item.prompt, language, untranslated)}});
  }
  return {{"kind", "questionnaire"},
          {"scale", {{"min", 1}, {"max", 5}}},
          {"items", items},
          {"untranslated", untranslated}};
}

Json Tutor::submit_questionnaire(const std::string& learner_id, const std::map<std::string, int>& responses) {
  auto& s = slot(learner_id);
  std::lock_guard lock(s.mutex);
  const auto vector = score_questionnaire(pack_.questionnaire, responses);
  Transaction tx(s.state, learner_id, config_.model, clock_);
  tx.append(ProfileUpdated{vector});
  const auto phase = tx.session().phase;
  commit(s, tx);
  return {{"style", to_json(vector)}, {"dominant", style_code(vector.dominant)}, {"phase", session_phase_name(phase)}};
}

Json Tutor::next_step(const std::string& learner_id) {
  auto& s = slot(learner_id);
  std::lock_guard lock(s.mutex);
  Transaction tx(s.state, learner_id, config_.model, clock_);
  const auto& language = s.state.language;
  bool untranslated = false;
  Json payload;

  for (int step = 0; payload.is_null(); ++step) {
    if (step > 8) throw TutorError(ErrorCode::ContentUnavailable, learner_id, "policy did not settle");
    const auto inference = infer(rules_, session_facts(tx.state, pack_), config_.max_inference_iterations);
    const auto& action = inference.action;
    const auto& session = tx.session();

    switch (action.kind) {
      case ActionKind::RequestProfile:
        payload = questionnaire_payload(language);
        untranslated = payload["untranslated"].get<bool>();
        break;

      case ActionKind::EndCourse:
        if (session.phase != SessionPhase::Completed) tx.append(CourseCompleted{});
        payload = {{"kind", "completed"}};
        break;

      case ActionKind::GivePreTest: {
        if (!session.pending_test) {
          const auto level = tx.state.last_level.value_or(KnowledgeLevel::Good);
          tx.append(TestIssued{issue_test(tx.state, action.concept_id, TestPhase::PreTest, level)});
        }
        payload = {{"kind", "test"}, {"test", test_payload(*tx.session().pending_test, language, untranslated)}};
        break;
      }

      case ActionKind::DeliverLesson: {
        if (session.lesson_delivered) {
          payload = {{"kind", "lesson"},
                     {"lesson", lesson_payload(action.concept_id, *session.lesson_style, language, untranslated)}};
          break;
        }
        const auto requested = action.style.value_or(session.lesson_style.value_or(LearningStyle::SensationSeeking));
        const auto delivered = variant_for(pack_, action.concept_id, requested).style;
        tx.append(LessonDelivered{action.concept_id, delivered});
        break;
      }

      case ActionKind::GivePostTest: {
        const auto style = session.lesson_style.value_or(LearningStyle::SensationSeeking);
        Json lesson = lesson_payload(action.concept_id, style, language, untranslated);
        if (!session.pending_test) {
          const auto& record = tx.state.mastery.at(action.concept_id);
          auto level = record.post_level.value_or(record.pre_level.value_or(KnowledgeLevel::Good));
          if (const auto* shift = inference.memory.find("posttest", "level_shift")) {
            if (const auto* delta = std::get_if<std::int64_t>(shift)) level = shift_level(level, static_cast<int>(*delta));
          }
          tx.append(TestIssued{issue_test(tx.state, action.concept_id, TestPhase::PostTest, level)});
        }
        payload = {{"kind", "lesson"},
                   {"lesson", lesson},
                   {"post_test", test_payload(*tx.session().pending_test, language, untranslated)}};
        break;
      }

      case ActionKind::Remediate: {
        const int attempt = session.last_decision ? session.last_decision->attempt_no : 1;
        const auto style = action.style.value_or(
            remediation_style(pack_, action.concept_id, session.lesson_style.value_or(LearningStyle::SensationSeeking)));
        tx.append(RemediationStarted{action.concept_id, attempt, style});
        break;
      }

      case ActionKind::AdvanceTo:
        if (pack_.find_concept(action.concept_id) == nullptr) {
          throw TutorError(ErrorCode::ContentUnavailable, action.concept_id);
        }
        tx.append(ConceptAdvanced{action.concept_id});
        break;
    }
  }

  const auto phase = tx.session().phase;
  commit(s, tx);
  payload["phase"] = session_phase_name(phase);
  payload["untranslated"] = untranslated;
  return payload;
}

Json Tutor::submit_test(const std::string& learner_id, const std::string& test_id,
                        const std::map<std::string, int>& answers) {
  auto& s = slot(learner_id);
  std::lock_guard lock(s.mutex);
  Transaction tx(s.state, learner_id, config_.model, clock_);
  const auto& session = tx.session();
  if (!session.pending_test || session.pending_test->test_id != test_id) {
    if (s.issued_tests.contains(test_id)) throw TutorError(ErrorCode::WrongPhase, test_id, "test is not pending");
    throw TutorError(ErrorCode::UnknownTest, test_id);
  }
  const TestInstance instance = *session.pending_test;
  const auto bank = bank_for(pack_, instance.concept_id);
  const auto result = score_test(instance, answers, bank);

  for (const auto& [qid, correct] : result.correctness) {
    tx.append(AnswerRecorded{test_id, qid, answers.at(qid), correct});
  }
  tx.append(TestScored{result, instance.phase, instance.concept_id});

  Json decision = nullptr;
  if (instance.phase == TestPhase::PostTest) {
    const auto made = *tx.session().last_decision;
    decision = {{"decision", made.decision == Decision::Advance ? "advance" : "remediate"},
                {"attempt_no", made.attempt_no}};
    const auto inference = infer(rules_, session_facts(tx.state, pack_), config_.max_inference_iterations);
    const auto& action = inference.action;
    const auto& now = tx.session();
    switch (action.kind) {
      case ActionKind::Remediate:
        tx.append(RemediationStarted{
            action.concept_id, made.attempt_no,
            action.style.value_or(remediation_style(pack_, action.concept_id,
                                                    now.lesson_style.value_or(LearningStyle::SensationSeeking)))});
        break;
      case ActionKind::AdvanceTo:
        if (pack_.find_concept(action.concept_id) == nullptr) {
          throw TutorError(ErrorCode::ContentUnavailable, action.concept_id);
        }
        tx.append(ConceptAdvanced{action.concept_id});
        break;
      case ActionKind::EndCourse:
        tx.append(CourseCompleted{});
        break;
      default:
        break;  // a custom policy may defer the transition to the next step
    }
  }

  const auto& after = tx.session();
  Json payload = {{"kind", "result"},
                  {"test_id", test_id},
                  {"phase", phase_name(instance.phase)},
                  {"concept_id", instance.concept_id},
                  {"result", to_json(result)},
                  {"decision", decision},
                  {"session_phase", session_phase_name(after.phase)},
                  {"active_concept", after.active_concept ? Json(*after.active_concept) : Json(nullptr)},
                  {"lesson_style", after.lesson_style ? Json(style_code(*after.lesson_style)) : Json(nullptr)}};
  commit(s, tx);
  return payload;
}

Json Tutor::progress(const std::string& learner_id) {
  const auto st = state(learner_id);
  Json concepts = Json::array();
  for (const auto& id : prerequisite_order(pack_)) {
    MasteryRecord record;
    record.concept_id = id;
    if (auto it = st.mastery.find(id); it != st.mastery.end()) record = it->second;
    concepts.push_back(to_json(record));
  }
  Json session = nullptr;
  if (st.current_session) {
    session = {{"phase", session_phase_name(st.current_session->phase)},
               {"active_concept", st.current_session->active_concept ? Json(*st.current_session->active_concept)
                                                                     : Json(nullptr)}};
  }
  return {{"learner_id", st.learner_id},
          {"language", st.language},
          {"session", session},
          {"style", st.style ? to_json(*st.style) : Json(nullptr)},
          {"last_level", level_json(st.last_level)},
          {"concepts", concepts}};
}

std::string Tutor::chat_translate(const std::string& learner_id, const std::string& target_language,
                                  const std::string& text) {
  const auto source = state(learner_id).language;
  if (!is_language_code(target_language)) throw TutorError(ErrorCode::InvalidLanguage, target_language);
  return cached_translate(cache_, *backend_, TranslationRequest{source, target_language, text});
}

LearnerState Tutor::state(const std::string& learner_id) const {
  auto& s = slot(learner_id);
  std::lock_guard lock(s.mutex);
  return s.state;
}

std::vector<LearnerEvent> Tutor::events(const std::string& learner_id) const {
  auto& s = slot(learner_id);
  std::lock_guard lock(s.mutex);
  return s.events;
}

std::vector<std::string> Tutor::learner_ids() const {
  std::shared_lock lock(registry_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : slots_) ids.push_back(id);
  return ids;
}

}  // namespace tutor
