#include <openssl/evp.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "chainforge/errors.hpp"
#include "chainforge/manifest.hpp"
#include "chainforge/model_io.hpp"

namespace chainforge {

namespace {

using json = nlohmann::ordered_json;

std::string hex(const unsigned char* data, size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (size_t i = 0; i < n; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0x0f]);
  }
  return out;
}

}  // namespace

std::string sha256File(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (fp == nullptr) throw IoError("cannot open '" + path + "' for hashing");
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> guard(fp, &std::fclose);

  std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx(EVP_MD_CTX_new(),
                                                         &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 init failed");

  unsigned char buf[1 << 16];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, fp)) > 0) {
    if (EVP_DigestUpdate(ctx.get(), buf, got) != 1)
      throw Error("SHA-256 update failed");
  }
  if (std::ferror(fp) != 0) throw IoError("read error while hashing '" + path + "'");

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw Error("SHA-256 final failed");
  return hex(digest, len);
}

std::string RunManifest::toJson() const {
  json j;
  j["command"] = command;
  j["inputs"] = json::array();
  for (const ManifestInput& in : inputs)
    j["inputs"].push_back(
        {{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
  j["mode"] = mode;
  j["objective"] = objective;
  j["backend"] = backend;
  j["time_limit_sec"] = timeLimitSec;
  j["threads"] = threads;
  j["seed"] = seed;
  j["remdr_steps"] = remdrSteps;
  j["used_nodes_steps"] = usedNodesSteps;
  j["outputs"] = outputs;
  j["timings_sec"] = json::object();
  for (const auto& [name, sec] : timingsSec) j["timings_sec"][name] = sec;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::fromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("manifest root must be an object");

  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    for (const json& in : j.at("inputs")) {
      ManifestInput mi;
      mi.role = in.at("role").get<std::string>();
      mi.path = in.at("path").get<std::string>();
      mi.sha256 = in.at("sha256").get<std::string>();
      m.inputs.push_back(std::move(mi));
    }
    m.mode = j.value("mode", std::string());
    m.objective = j.value("objective", std::string());
    m.backend = j.value("backend", std::string());
    m.timeLimitSec = j.value("time_limit_sec", 0.0);
    m.threads = j.value("threads", 1);
    m.seed = j.value("seed", uint64_t{0});
    m.remdrSteps = j.value("remdr_steps", 0);
    m.usedNodesSteps = j.value("used_nodes_steps", 0);
    if (j.contains("outputs"))
      m.outputs = j.at("outputs").get<std::vector<std::string>>();
    if (j.contains("timings_sec"))
      for (const auto& [name, sec] : j.at("timings_sec").items())
        m.timingsSec[name] = sec.get<double>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("manifest field error: ") + e.what());
  }
  return m;
}

void saveManifest(const RunManifest& m, const std::string& path) {
  writeFile(path, m.toJson());
}

RunManifest loadManifest(const std::string& path) {
  return RunManifest::fromJson(readFile(path));
}

}  // namespace chainforge
