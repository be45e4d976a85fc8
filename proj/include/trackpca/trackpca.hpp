#pragma once

#include "trackpca/csv.hpp"
#include "trackpca/errors.hpp"
#include "trackpca/ingest.hpp"
#include "trackpca/matrix.hpp"
#include "trackpca/model_io.hpp"
#include "trackpca/pca.hpp"
#include "trackpca/pipeline.hpp"
#include "trackpca/regression.hpp"
#include "trackpca/report.hpp"
#include "trackpca/scoring.hpp"
#include "trackpca/similarity.hpp"
#include "trackpca/student_t.hpp"
#include "trackpca/symmetric_eigen.hpp"
