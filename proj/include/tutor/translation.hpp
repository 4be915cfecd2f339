#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tutor {

inline constexpr std::size_t kDefaultMaxTextChars = 10'000;
inline constexpr std::size_t kDefaultCacheEntries = 10'000;

/// Lowercase BCP-47 primary subtag: [a-z]{2,3}.
bool is_language_code(std::string_view code);

struct LanguagePair {
  std::string source;
  std::string target;
  auto operator<=>(const LanguagePair&) const = default;
};

struct TranslationRequest {
  std::string source;
  std::string target;
  std::string text;
};

/// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(std::string_view text);

/// Throws InvalidLanguage or TextTooLong.
void validate_request(const TranslationRequest& request, std::size_t max_chars = kDefaultMaxTextChars);

/// Backends must be safe to call concurrently.
class TranslatorBackend {
 public:
  virtual ~TranslatorBackend() = default;
  virtual std::string_view name() const = 0;
  /// Supported directed pairs; nullopt means any pair may be attempted.
  virtual std::optional<std::set<LanguagePair>> capability() const = 0;
  /// Called only for pairs with source != target. Throws UnsupportedPair for
  /// pairs outside the capability.
  virtual std::string translate(const TranslationRequest& request) = 0;

  bool supports(const std::string& source, const std::string& target) const;
};

/// Identity fast path for source == target, otherwise the backend.
std::string translate(TranslatorBackend& backend, const TranslationRequest& request,
                      std::size_t max_chars = kDefaultMaxTextChars);

/// Directed pairs over n languages: n * (n - 1).
std::uint64_t pair_count(const std::set<std::string>& languages);

/// Bounded LRU cache keyed by (source, target, SHA-256 of text). Safe for
/// concurrent use; racing writers of one key store the same value.
class TranslationCache {
 public:
  explicit TranslationCache(std::size_t capacity = kDefaultCacheEntries);

  std::optional<std::string> get(const TranslationRequest& request);
  void put(const TranslationRequest& request, std::string translated);

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  static std::string key_for(const TranslationRequest& request);

  using Entry = std::pair<std::string, std::string>;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> order_;  // most recent first
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
};

std::string cached_translate(TranslationCache& cache, TranslatorBackend& backend, const TranslationRequest& request,
                             std::size_t max_chars = kDefaultMaxTextChars);

/// Returns text unchanged for every pair.
class IdentityBackend final : public TranslatorBackend {
 public:
  std::string_view name() const override { return "identity"; }
  std::optional<std::set<LanguagePair>> capability() const override { return std::nullopt; }
  std::string translate(const TranslationRequest& request) override { return request.text; }
};

struct GlossaryEntry {
  std::string source;
  std::string target;
  std::string term;         // one or more whitespace-separated tokens
  std::string translation;
};

/// Deterministic term-substitution translator. Text is split on whitespace;
/// at each token the longest matching term (in tokens) is replaced and
/// unknown tokens pass through. Whitespace outside replaced spans is kept.
class GlossaryBackend final : public TranslatorBackend {
 public:
  explicit GlossaryBackend(const std::vector<GlossaryEntry>& entries, std::set<LanguagePair> declared_pairs = {});

  std::string_view name() const override { return "glossary"; }
  std::optional<std::set<LanguagePair>> capability() const override { return pairs_; }
  std::string translate(const TranslationRequest& request) override;

  std::set<std::string> languages() const;

 private:
  struct Term {
    std::vector<std::string> tokens;
    std::string translation;
  };
  std::set<LanguagePair> pairs_;
  std::map<LanguagePair, std::vector<Term>> terms_;  // longest first
};

// Glossary file: UTF-8, one record per line, tab-separated:
//   <source>\t<target>\t<term>\t<translation>
// A line with only <source>\t<target> declares a pair with no terms.
// Lines starting with '#' and blank lines are ignored.
struct GlossaryFile {
  std::vector<GlossaryEntry> entries;
  std::set<LanguagePair> pairs;
};
GlossaryFile parse_glossary(std::string_view content);
GlossaryFile load_glossary(const std::filesystem::path& path);

struct RemoteConfig {
  std::string endpoint;  // http://host:port/path
  std::string api_key;
  std::chrono::milliseconds timeout{5000};
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{200};  // doubled on each retry
  std::optional<std::set<std::string>> languages;
};

std::unique_ptr<TranslatorBackend> remote_backend(RemoteConfig config);

/// Builds a backend from TRANSLATOR_BACKEND (identity | glossary | remote),
/// GLOSSARY_PATH, TRANSLATOR_ENDPOINT and TRANSLATOR_API_KEY. Defaults to
/// identity when TRANSLATOR_BACKEND is unset.
std::unique_ptr<TranslatorBackend> backend_from_env();

}  // namespace tutor
