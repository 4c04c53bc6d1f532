#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lovebirds::corpus {

constexpr std::int32_t kPadId = 0;
constexpr std::int32_t kUnkId = 1;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kMentionMask = "@USER";

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawTweet {
  std::string tweet_id;
  std::string author_id;
  std::string text;
  std::vector<std::string> mentions;
  std::uint64_t author_follower_count = 0;

  bool operator==(const RawTweet&) const = default;
};

enum class Split { Train, Dev, Test };

std::string_view split_name(Split s);
Split parse_split(std::string_view name);

struct CouplePair {
  std::string user_a;  // user_a < user_b
  std::string user_b;
  Split split = Split::Train;

  bool operator==(const CouplePair&) const = default;
};

// Exactly L ids; positions >= valid_len are kPadId.
struct TokenizedTweet {
  std::vector<std::int32_t> token_ids;
  int valid_len = 0;
};

// K tweet slots, newest first; slots >= tweet_valid_count are all-PAD.
struct UserProfile {
  std::string user_id;
  std::vector<TokenizedTweet> tweets;
  int tweet_valid_count = 0;

  int K() const { return static_cast<int>(tweets.size()); }
  int L() const { return tweets.empty() ? 0 : static_cast<int>(tweets.front().token_ids.size()); }
};

}  // namespace lovebirds::corpus
