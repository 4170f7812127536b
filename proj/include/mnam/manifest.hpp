#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "mnam/errors.hpp"
#include "mnam/io.hpp"
#include "mnam/version.hpp"

namespace mnam {

// SHA-256 of a file, hex-encoded. Used to pin run inputs in the manifest.
inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("EVP_MD_CTX_new failed");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("EVP_DigestInit_ex failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0 &&
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw Error("EVP_DigestUpdate failed");
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("EVP_DigestFinal_ex failed");
  }
  EVP_MD_CTX_free(ctx);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", digest[i]);
    hex += b;
  }
  return hex;
}

// Everything needed to re-run an invocation bit for bit: the effective
// config, the seed, the code version, and checksums of the input files.
// Deliberately no timestamps.
inline json make_manifest(const json& effective_config, std::uint64_t seed,
                          const std::vector<std::string>& input_paths,
                          const std::vector<std::string>& output_names) {
  json j;
  j["tool_version"] = kVersion;
  j["seed"] = seed;
  j["config"] = effective_config;
  json inputs = json::object();
  for (const auto& p : input_paths) inputs[p] = sha256_file(p);
  j["inputs"] = inputs;
  j["outputs"] = output_names;
  return j;
}

}
