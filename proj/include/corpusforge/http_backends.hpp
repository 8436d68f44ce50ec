// Copyright 2026 The corpusforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP translator and scorer clients.
//
//   translator: POST {"src": tag, "tgt": tag, "texts": [...]}    -> {"texts": [...]}
//   scorer:     POST {"src": tag, "tgt": tag, "pairs": [[s, t]]} -> {"scores": [...]}
//
// Tags are written as Family+code_Script. Connection failures and 5xx
// responses are retried with exponential backoff; anything else fails at
// once with BackendError. Plain http only.

#ifndef CORPUSFORGE_HTTP_BACKENDS_HPP_
#define CORPUSFORGE_HTTP_BACKENDS_HPP_

#include <chrono>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "corpusforge/backends.hpp"
#include "corpusforge/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace corpusforge::augment {

struct HttpOptions {
  std::chrono::milliseconds timeout{30000};
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{200};
};

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // starts with '/'
};

inline Endpoint parse_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.compare(0, scheme, "http") != 0) {
    throw ConfigError("backend url must start with http://: '" + url + "'");
  }
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

namespace detail {

inline nlohmann::json post_json(const Endpoint& ep, const nlohmann::json& body,
                                const HttpOptions& opt) {
  const std::string payload = body.dump();
  auto backoff = opt.initial_backoff;
  std::string last_error = "no attempt made";
  for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    httplib::Client client(ep.base);
    const auto secs = opt.timeout.count() / 1000;
    const auto usecs = (opt.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    const auto res = client.Post(ep.path, payload, "application/json");
    if (res && res->status >= 200 && res->status < 300) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw BackendError(ep.base + ep.path + ": response is not JSON: " + e.what());
      }
    }
    if (res && res->status < 500) {
      throw BackendError(ep.base + ep.path + ": HTTP " + std::to_string(res->status));
    }
    last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt < opt.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw BackendError(ep.base + ep.path + ": giving up after " + std::to_string(opt.max_attempts) +
                     " attempts: " + last_error);
}

}  // namespace detail

class HttpTranslator : public TranslatorClient {
 public:
  explicit HttpTranslator(const std::string& url, HttpOptions options = {})
      : endpoint_(parse_endpoint(url)), options_(options) {}

  std::vector<std::string> translate(const std::vector<std::string>& texts, const LanguageTag& src,
                                     const LanguageTag& tgt) override {
    nlohmann::json body;
    body["src"] = lang::format_tag(src);
    body["tgt"] = lang::format_tag(tgt);
    body["texts"] = texts;
    const auto res = detail::post_json(endpoint_, body, options_);
    try {
      auto out = res.at("texts").get<std::vector<std::string>>();
      if (out.size() != texts.size()) throw BackendError("translator returned a short batch");
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("translator response lacks \"texts\": ") + e.what());
    }
  }

 private:
  Endpoint endpoint_;
  HttpOptions options_;
};

class HttpScorer : public ScorerClient {
 public:
  explicit HttpScorer(const std::string& url, HttpOptions options = {})
      : endpoint_(parse_endpoint(url)), options_(options) {}

  std::vector<double> score(const std::vector<TextPair>& pairs, const LanguageTag& src,
                            const LanguageTag& tgt) override {
    nlohmann::json body;
    body["src"] = lang::format_tag(src);
    body["tgt"] = lang::format_tag(tgt);
    body["pairs"] = nlohmann::json::array();
    for (const auto& [s, t] : pairs) body["pairs"].push_back({s, t});
    const auto res = detail::post_json(endpoint_, body, options_);
    try {
      auto out = res.at("scores").get<std::vector<double>>();
      if (out.size() != pairs.size()) throw BackendError("scorer returned a short batch");
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("scorer response lacks \"scores\": ") + e.what());
    }
  }

 private:
  Endpoint endpoint_;
  HttpOptions options_;
};

}  // namespace corpusforge::augment

#endif  // CORPUSFORGE_HTTP_BACKENDS_HPP_
