#include "tutor/translation.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tutor/error.hpp"

namespace tutor {

bool is_language_code(std::string_view code) {
  return (code.size() == 2 || code.size() == 3) &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(
      text.begin(), text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

void validate_request(const TranslationRequest& request, std::size_t max_chars) {
  if (!is_language_code(request.source)) throw TutorError(ErrorCode::InvalidLanguage, request.source);
  if (!is_language_code(request.target)) throw TutorError(ErrorCode::InvalidLanguage, request.target);
  const auto length = utf8_length(request.text);
  if (length > max_chars) {
    throw TutorError(ErrorCode::TextTooLong, std::to_string(length), "limit " + std::to_string(max_chars));
  }
}

bool TranslatorBackend::supports(const std::string& source, const std::string& target) const {
  const auto pairs = capability();
  return !pairs || pairs->contains(LanguagePair{source, target});
}

std::string translate(TranslatorBackend& backend, const TranslationRequest& request, std::size_t max_chars) {
  validate_request(request, max_chars);
  if (request.source == request.target) return request.text;
  if (!backend.supports(request.source, request.target)) {
    throw TutorError(ErrorCode::UnsupportedPair, request.source + "->" + request.target);
  }
  return backend.translate(request);
}

std::uint64_t pair_count(const std::set<std::string>& languages) {
  const std::uint64_t n = languages.size();
  return n == 0 ? 0 : n * (n - 1);
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

TranslationCache::TranslationCache(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

std::string TranslationCache::key_for(const TranslationRequest& request) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(request.text.data(), request.text.size(), digest, &length, EVP_sha256(), nullptr);
  std::string key = request.source + '\x1f' + request.target + '\x1f';
  key.append(reinterpret_cast<const char*>(digest), length);
  return key;
}

std::optional<std::string> TranslationCache::get(const TranslationRequest& request) {
  const auto key = key_for(request);
  std::lock_guard lock(mutex_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  order_.splice(order_.begin(), order_, it->second);
  return it->second->second;
}

void TranslationCache::put(const TranslationRequest& request, std::string translated) {
  auto key = key_for(request);
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(key); it != index_.end()) {
    it->second->second = std::move(translated);
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  order_.emplace_front(key, std::move(translated));
  index_.emplace(std::move(key), order_.begin());
  if (order_.size() > capacity_) {
    index_.erase(order_.back().first);
    order_.pop_back();
  }
}

std::size_t TranslationCache::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

std::string cached_translate(TranslationCache& cache, TranslatorBackend& backend, const TranslationRequest& request,
                             std::size_t max_chars) {
  validate_request(request, max_chars);
  if (request.source == request.target) return request.text;
  if (auto hit = cache.get(request)) return *hit;
  auto translated = translate(backend, request, max_chars);
  cache.put(request, translated);
  return translated;
}

// ---------------------------------------------------------------------------
// Glossary backend
// ---------------------------------------------------------------------------

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const auto start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

GlossaryBackend::GlossaryBackend(const std::vector<GlossaryEntry>& entries, std::set<LanguagePair> declared_pairs)
    : pairs_(std::move(declared_pairs)) {
  for (const auto& e : entries) {
    LanguagePair pair{e.source, e.target};
    pairs_.insert(pair);
    auto tokens = split_tokens(e.term);
    if (tokens.empty()) continue;
    auto& terms = terms_[pair];
    // Later duplicates of a term replace earlier ones.
    auto same = std::find_if(terms.begin(), terms.end(), [&](const Term& t) { return t.tokens == tokens; });
    if (same != terms.end()) {
      same->translation = e.translation;
    } else {
      terms.push_back({std::move(tokens), e.translation});
    }
  }
  for (auto& [pair, terms] : terms_) {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Term& a, const Term& b) { return a.tokens.size() > b.tokens.size(); });
  }
}

std::set<std::string> GlossaryBackend::languages() const {
  std::set<std::string> out;
  for (const auto& p : pairs_) {
    out.insert(p.source);
    out.insert(p.target);
  }
  return out;
}

std::string GlossaryBackend::translate(const TranslationRequest& request) {
  const LanguagePair pair{request.source, request.target};
  if (!pairs_.contains(pair)) throw TutorError(ErrorCode::UnsupportedPair, request.source + "->" + request.target);
  auto found = terms_.find(pair);
  if (found == terms_.end()) return request.text;
  const auto& terms = found->second;

  // Tokens with their byte spans so untouched whitespace survives.
  struct Span {
    std::size_t begin, end;
  };
  const std::string_view text = request.text;
  std::vector<Span> spans;
  for (std::size_t i = 0; i < text.size();) {
    while (i < text.size() && is_space(text[i])) ++i;
    const auto start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) spans.push_back({start, i});
  }

  std::string out;
  std::size_t cursor = 0;  // byte offset copied so far
  for (std::size_t t = 0; t < spans.size();) {
    const Term* match = nullptr;
    for (const auto& term : terms) {
      if (term.tokens.size() > spans.size() - t) continue;
      bool ok = true;
      for (std::size_t k = 0; k < term.tokens.size() && ok; ++k) {
        const auto& s = spans[t + k];
        ok = text.substr(s.begin, s.end - s.begin) == term.tokens[k];
      }
      if (ok) {
        match = &term;
        break;
      }
    }
    if (match == nullptr) {
      ++t;
      continue;
    }
    out.append(text.substr(cursor, spans[t].begin - cursor));
    out.append(match->translation);
    cursor = spans[t + match->tokens.size() - 1].end;
    t += match->tokens.size();
  }
  out.append(text.substr(cursor));
  return out;
}

GlossaryFile parse_glossary(std::string_view content) {
  GlossaryFile file;
  std::istringstream in{std::string(content)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1) {
      fields.push_back(line.substr(start, tab - start));
    }
    fields.push_back(line.substr(start));
    if ((fields.size() != 2 && fields.size() != 4) || !is_language_code(fields[0]) || !is_language_code(fields[1])) {
      throw TutorError(ErrorCode::MalformedFile, "glossary line " + std::to_string(line_no), line);
    }
    file.pairs.insert({fields[0], fields[1]});
    if (fields.size() == 4) file.entries.push_back({fields[0], fields[1], fields[2], fields[3]});
  }
  return file;
}

GlossaryFile load_glossary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TutorError(ErrorCode::MalformedFile, path.string(), "cannot open glossary");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_glossary(buffer.str());
}

std::unique_ptr<TranslatorBackend> backend_from_env() {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  const auto kind = env("TRANSLATOR_BACKEND");
  if (kind.empty() || kind == "identity") return std::make_unique<IdentityBackend>();
  if (kind == "glossary") {
    const auto path = env("GLOSSARY_PATH");
    if (path.empty()) throw TutorError(ErrorCode::BadRequest, "GLOSSARY_PATH", "required for glossary backend");
    auto file = load_glossary(path);
    return std::make_unique<GlossaryBackend>(file.entries, file.pairs);
  }
  if (kind == "remote") {
    RemoteConfig config;
    config.endpoint = env("TRANSLATOR_ENDPOINT");
    config.api_key = env("TRANSLATOR_API_KEY");
    if (config.endpoint.empty()) throw TutorError(ErrorCode::BadRequest, "TRANSLATOR_ENDPOINT", "required");
    return remote_backend(std::move(config));
  }
  throw TutorError(ErrorCode::BadRequest, "TRANSLATOR_BACKEND", kind);
}

}  // namespace tutor
