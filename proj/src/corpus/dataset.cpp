#include "lovebirds/corpus/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace lovebirds::corpus {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot write " + path.string());
  return out;
}

// Reads "#lovebirds-<kind> v1" and returns the remaining key=value fields.
std::vector<std::string> expect_header(std::istream& in, const std::string& kind,
                                       const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw CorpusError(path.string() + ": empty file");
  auto fields = split_tabs(line);
  if (fields.empty() || fields[0] != "#lovebirds-" + kind + " v1")
    throw CorpusError(path.string() + ": expected header '#lovebirds-" + kind + " v1'");
  fields.erase(fields.begin());
  return fields;
}

int header_int(const std::vector<std::string>& fields, const std::string& key) {
  for (const auto& f : fields)
    if (f.rfind(key + "=", 0) == 0) return std::stoi(f.substr(key.size() + 1));
  throw CorpusError("header is missing " + key);
}

}  // namespace

void Dataset::index() {
  std::sort(users.begin(), users.end(),
            [](const UserProfile& a, const UserProfile& b) { return a.user_id < b.user_id; });
  lookup_.clear();
  for (std::size_t i = 0; i < users.size(); ++i) lookup_[users[i].user_id] = static_cast<int>(i);
}

int Dataset::user_index(const std::string& user_id) const {
  auto it = lookup_.find(user_id);
  if (it == lookup_.end()) throw CorpusError("unknown user " + user_id);
  return it->second;
}

std::vector<CouplePair> Dataset::pairs_in(Split s) const {
  std::vector<CouplePair> out;
  for (const auto& p : pairs)
    if (p.split == s) out.push_back(p);
  return out;
}

Dataset Dataset::with_K(int new_K) const {
  if (new_K <= 0) throw CorpusError("with_K: K must be positive");
  Dataset ds = *this;
  ds.K = new_K;
  for (auto& u : ds.users) {
    if (u.K() > new_K) {
      u.tweets.resize(static_cast<std::size_t>(new_K));
    } else {
      TokenizedTweet empty;
      empty.token_ids.assign(static_cast<std::size_t>(L), kPadId);
      u.tweets.resize(static_cast<std::size_t>(new_K), empty);
    }
    u.tweet_valid_count = std::min(u.tweet_valid_count, new_K);
  }
  ds.index();
  return ds;
}

void write_profiles(const std::filesystem::path& path, const std::vector<UserProfile>& users, int K,
                    int L) {
  auto out = open_out(path);
  out << "#lovebirds-profiles v1\tK=" << K << "\tL=" << L << "\n";
  for (const auto& u : users) {
    if (u.K() != K || u.L() != L) throw CorpusError("profile " + u.user_id + " is not K x L");
    out << u.user_id << '\t' << u.tweet_valid_count << '\t';
    bool first = true;
    for (const auto& t : u.tweets)
      for (auto id : t.token_ids) {
        if (!first) out << ' ';
        out << id;
        first = false;
      }
    out << '\n';
  }
}

std::vector<UserProfile> read_profiles(const std::filesystem::path& path, int* K_out, int* L_out) {
  auto in = open_in(path);
  auto header = expect_header(in, "profiles", path);
  const int K = header_int(header, "K"), L = header_int(header, "L");
  std::vector<UserProfile> users;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 3) throw CorpusError(path.string() + ": malformed profile line");
    UserProfile u;
    u.user_id = f[0];
    u.tweet_valid_count = std::stoi(f[1]);
    std::istringstream ids(f[2]);
    for (int k = 0; k < K; ++k) {
      TokenizedTweet t;
      t.token_ids.resize(static_cast<std::size_t>(L));
      for (int l = 0; l < L; ++l)
        if (!(ids >> t.token_ids[static_cast<std::size_t>(l)]))
          throw CorpusError(path.string() + ": profile " + u.user_id + " has fewer than K*L ids");
      t.valid_len = 0;
      while (t.valid_len < L && t.token_ids[static_cast<std::size_t>(t.valid_len)] != kPadId) ++t.valid_len;
      u.tweets.push_back(std::move(t));
    }
    users.push_back(std::move(u));
  }
  if (K_out) *K_out = K;
  if (L_out) *L_out = L;
  return users;
}

void write_pairs(const std::filesystem::path& path, const std::vector<CouplePair>& pairs) {
  auto out = open_out(path);
  out << "#lovebirds-pairs v1\n";
  for (const auto& p : pairs) out << p.user_a << '\t' << p.user_b << '\t' << split_name(p.split) << '\n';
}

std::vector<CouplePair> read_pairs(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, "pairs", path);
  std::vector<CouplePair> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 3) throw CorpusError(path.string() + ": malformed pair line");
    pairs.push_back(CouplePair{f[0], f[1], parse_split(f[2])});
  }
  return pairs;
}

void write_vocab(const std::filesystem::path& path, const Vocabulary& vocab) {
  auto out = open_out(path);
  out << "#lovebirds-vocab v1\tmin_count=" << vocab.min_count() << "\n";
  for (std::int32_t id = 0; id < vocab.size(); ++id)
    out << vocab.token(id) << '\t' << id << '\t' << vocab.frequency(id) << '\n';
}

Vocabulary read_vocab(const std::filesystem::path& path) {
  auto in = open_in(path);
  auto header = expect_header(in, "vocab", path);
  Vocabulary vocab;
  vocab.set_min_count(header_int(header, "min_count"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 3) throw CorpusError(path.string() + ": malformed vocab line");
    const auto id = std::stoi(f[1]);
    if (id < 2) {
      if (vocab.token(id) != f[0]) throw CorpusError(path.string() + ": reserved ids do not match");
      continue;
    }
    if (id != vocab.size()) throw CorpusError(path.string() + ": ids are not contiguous");
    vocab.append(f[0], std::stoull(f[2]));
  }
  return vocab;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);
  write_profiles(dir / "profiles.tsv", ds.users, ds.K, ds.L);
  write_pairs(dir / "pairs.tsv", ds.pairs);
  write_vocab(dir / "vocab.tsv", ds.vocab);
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.users = read_profiles(dir / "profiles.tsv", &ds.K, &ds.L);
  ds.pairs = read_pairs(dir / "pairs.tsv");
  ds.vocab = read_vocab(dir / "vocab.tsv");
  ds.index();
  for (const auto& p : ds.pairs) {
    ds.user_index(p.user_a);
    ds.user_index(p.user_b);
  }
  return ds;
}

}  // namespace lovebirds::corpus
