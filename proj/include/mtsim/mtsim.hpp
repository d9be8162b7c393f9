#pragma once

#include "mtsim/buffer_pool.hpp"
#include "mtsim/device.hpp"
#include "mtsim/engine.hpp"
#include "mtsim/error.hpp"
#include "mtsim/random.hpp"
#include "mtsim/recommender.hpp"
#include "mtsim/tuner.hpp"
#include "mtsim/workload.hpp"
