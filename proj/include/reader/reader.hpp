#pragma once

#include "reader/analysis.hpp"
#include "reader/batch_model.hpp"
#include "reader/composer.hpp"
#include "reader/core.hpp"
#include "reader/corpus.hpp"
#include "reader/drafter.hpp"
#include "reader/engine.hpp"
#include "reader/kv_cache.hpp"
#include "reader/model.hpp"
#include "reader/serialize.hpp"
#include "reader/suffix_array.hpp"
#include "reader/tokenizer.hpp"
#include "reader/transformer.hpp"
#include "reader/trie.hpp"
