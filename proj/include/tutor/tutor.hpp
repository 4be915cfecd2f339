#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "tutor/content.hpp"
#include "tutor/learner_model.hpp"
#include "tutor/rules.hpp"
#include "tutor/translation.hpp"

namespace tutor {

using Json = nlohmann::ordered_json;

/// Milliseconds since the epoch; injectable so simulations are reproducible.
using Clock = std::function<std::int64_t()>;
Clock system_clock();

struct TutorConfig {
  std::optional<std::filesystem::path> event_log;    // append-only NDJSON
  std::optional<std::filesystem::path> credentials;  // defaults to <event_log>.auth
  ModelConfig model;
  std::chrono::seconds token_ttl{std::chrono::hours(24)};
  int pbkdf2_iterations = 100'000;
  std::uint64_t seed_salt = 0;  // mixed into every question-selection seed
  int max_inference_iterations = 64;
  std::size_t cache_entries = kDefaultCacheEntries;
  bool keep_events = true;  // retain each learner's events in memory
};

/// Working memory for the expert rules, derived from a learner state and the
/// content pack. Fact names are listed in docs/rules.md.
WorkingMemory session_facts(const LearnerState& state, const ContentPack& pack);

/// First concept in prerequisite order that is not yet mastered.
std::optional<std::string> next_unmastered_concept(const LearnerState& state, const ContentPack& pack);

/// Next style along the fallback chain (after the variant actually delivered
/// for `current`) that has its own variant; `current` when there is none.
LearningStyle remediation_style(const ContentPack& pack, const std::string& concept_id, LearningStyle current);

/// The tutoring service: authentication, the per-concept pre-test / lesson /
/// post-test cycle driven by the expert rules, translation of outbound
/// content, and event-log persistence. Requests for one learner are
/// serialised; different learners proceed in parallel.
class Tutor {
 public:
  Tutor(ContentPack pack, RuleSet rules, std::shared_ptr<TranslatorBackend> backend, TutorConfig config = {},
        Clock clock = system_clock());
  ~Tutor();
  Tutor(const Tutor&) = delete;
  Tutor& operator=(const Tutor&) = delete;

  const ContentPack& pack() const { return pack_; }
  const RuleSet& rules() const { return rules_; }
  bool language_supported(const std::string& language) const;

  // Authentication.
  std::string register_learner(const std::string& name, const std::string& password, const std::string& language);
  std::string login(const std::string& name, const std::string& password);
  /// Learner behind a session token; throws InvalidToken.
  std::string authenticate(const std::string& token) const;

  // Learner operations, addressed by learner id (the HTTP layer resolves
  // tokens first).
  Json questionnaire(const std::string& learner_id);
  Json submit_questionnaire(const std::string& learner_id, const std::map<std::string, int>& responses);
  Json next_step(const std::string& learner_id);
  Json submit_test(const std::string& learner_id, const std::string& test_id,
                   const std::map<std::string, int>& answers);
  Json progress(const std::string& learner_id);
  std::string chat_translate(const std::string& learner_id, const std::string& target_language,
                             const std::string& text);

  LearnerState state(const std::string& learner_id) const;
  std::vector<LearnerEvent> events(const std::string& learner_id) const;
  std::vector<std::string> learner_ids() const;

 private:
  struct Slot;
  struct Credential {
    std::string learner_id;
    std::string salt_hex;
    std::string hash_hex;
    int iterations;
  };
  struct ApiSession {
    std::string learner_id;
    std::int64_t created_at;
    std::int64_t expires_at;
  };
  class Transaction;

  Slot& slot(const std::string& learner_id) const;
  void commit(Slot& slot, Transaction& tx);
  void load_existing();

  std::string render(const LocalizedText& text, const std::string& language, bool& untranslated);
  std::string render_block(const ContentBlock& block, const std::string& language, bool& untranslated);
  Json questionnaire_payload(const std::string& language);
  Json test_payload(const TestInstance& instance, const std::string& language, bool& untranslated);
  Json lesson_payload(const std::string& concept_id, LearningStyle style, const std::string& language,
                      bool& untranslated);
  TestInstance issue_test(const LearnerState& state, const std::string& concept_id, TestPhase phase,
                          KnowledgeLevel level);

  ContentPack pack_;
  RuleSet rules_;
  std::shared_ptr<TranslatorBackend> backend_;
  TutorConfig config_;
  Clock clock_;
  TranslationCache cache_;

  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
  std::map<std::string, Credential> credentials_;  // by name

  mutable std::mutex session_mutex_;
  std::map<std::string, ApiSession> sessions_;  // by token

  std::mutex file_mutex_;
};

}  // namespace tutor
