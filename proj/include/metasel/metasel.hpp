#pragma once

#include "metasel/artifacts.hpp"
#include "metasel/augment.hpp"
#include "metasel/classifier.hpp"
#include "metasel/dataset_io.hpp"
#include "metasel/encoder.hpp"
#include "metasel/error.hpp"
#include "metasel/evaluate.hpp"
#include "metasel/pipeline.hpp"
#include "metasel/preprocess.hpp"
#include "metasel/semantics.hpp"
#include "metasel/sylvester.hpp"
#include "metasel/synthetic.hpp"
