#pragma once

#include <string>
#include <vector>

namespace phoenix::traces::data {

struct CatalogText {
  std::string attack;
  std::string variants;   // trace-file text, one session per variant
  std::string signature;  // reference PLTL formula
};

extern const char* const kAlphabet;
extern const char* const kRrcSeeds;
extern const char* const kNasSeeds;
const std::vector<CatalogText>& catalog();

}  // namespace phoenix::traces::data
