#include <fstream>
#include <sstream>

#include "lovebirds/encoders/embedding.hpp"

namespace lovebirds::encoders {

PretrainedVectors load_pretrained(const std::filesystem::path& path, const corpus::Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw corpus::CorpusError("cannot open embeddings " + path.string());
  PretrainedVectors out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> values;
    double x;
    while (fields >> x) values.push_back(x);
    if (values.empty()) continue;
    if (out.dim == 0) out.dim = static_cast<Index>(values.size());
    if (static_cast<Index>(values.size()) != out.dim)
      throw corpus::CorpusError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                std::to_string(out.dim) + " values");
    if (!vocab.contains(token)) continue;
    out.rows.emplace_back(vocab.id(token), std::move(values));
  }
  if (out.dim == 0) throw corpus::CorpusError(path.string() + ": no vectors");
  return out;
}

}  // namespace lovebirds::encoders
