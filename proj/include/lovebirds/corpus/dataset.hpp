#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "lovebirds/corpus/types.hpp"
#include "lovebirds/corpus/vocab.hpp"

namespace lovebirds::corpus {

// Encoded corpus: vocabulary, one K x L profile per user, and split pairs.
struct Dataset {
  Vocabulary vocab;
  std::vector<UserProfile> users;  // sorted by user_id
  std::vector<CouplePair> pairs;
  int K = 0;
  int L = 0;

  void index();  // rebuilds the user lookup; call after editing users
  int user_index(const std::string& user_id) const;
  const UserProfile& user(const std::string& user_id) const { return users[static_cast<std::size_t>(user_index(user_id))]; }
  std::vector<CouplePair> pairs_in(Split s) const;

  // Same corpus viewed with fewer (or more, padded) tweet slots. Profiles are
  // newest first, so truncation equals re-encoding with the smaller K.
  Dataset with_K(int new_K) const;

 private:
  std::unordered_map<std::string, int> lookup_;
};

// File layout inside a corpus directory:
//   profiles.tsv  "#lovebirds-profiles v1\tK=..\tL=.." then
//                 user_id \t tweet_valid_count \t K*L space-separated ids
//   pairs.tsv     "#lovebirds-pairs v1" then user_a \t user_b \t split
//   vocab.tsv     "#lovebirds-vocab v1\tmin_count=.." then token \t id \t frequency
void save_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& dir);

void write_profiles(const std::filesystem::path& path, const std::vector<UserProfile>& users, int K, int L);
std::vector<UserProfile> read_profiles(const std::filesystem::path& path, int* K = nullptr, int* L = nullptr);
void write_pairs(const std::filesystem::path& path, const std::vector<CouplePair>& pairs);
std::vector<CouplePair> read_pairs(const std::filesystem::path& path);
void write_vocab(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary read_vocab(const std::filesystem::path& path);

}  // namespace lovebirds::corpus
