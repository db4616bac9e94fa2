#include "dis2vec/metrics.hpp"

namespace dis2vec {

// Common English function words; fixed so ROUGE numbers stay comparable.
const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any",
      "are", "as", "at", "be", "because", "been", "before", "being", "below", "between",
      "both", "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during",
      "each", "few", "for", "from", "further", "had", "has", "have", "having", "he", "her",
      "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into",
      "is", "it", "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor",
      "not", "now", "of", "off", "on", "once", "only", "or", "other", "ought", "our", "ours",
      "ourselves", "out", "over", "own", "same", "she", "should", "so", "some", "such",
      "than", "that", "the", "their", "theirs", "them", "themselves", "then", "there",
      "these", "they", "this", "those", "through", "to", "too", "under", "until", "up",
      "very", "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom",
      "why", "will", "with", "would", "you", "your", "yours", "yourself", "yourselves",
      "also", "may", "might", "must", "shall", "upon", "yet", "since", "within", "without",
      "whether", "although", "though", "s", "t", "said", "says", "like", "one", "two",
      "many", "much", "every", "another", "either", "neither", "however", "thus",
  };
  return words;
}

}  // namespace dis2vec
