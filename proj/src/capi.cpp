#include "cxrisk.h"

#include <cstring>
#include <string>

#include "cxrisk/cam.hpp"
#include "cxrisk/io.hpp"
#include "cxrisk/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

struct ConfigHandle {
  cxrisk::ConfigMap map;
};

struct ModelHandle {
  cxrisk::RiskHead head;
};

ConfigHandle* unwrap(cxrisk_config* cfg) { return reinterpret_cast<ConfigHandle*>(cfg); }
const ConfigHandle* unwrap(const cxrisk_config* cfg) {
  return reinterpret_cast<const ConfigHandle*>(cfg);
}
ModelHandle* unwrap(cxrisk_model* m) { return reinterpret_cast<ModelHandle*>(m); }
const ModelHandle* unwrap(const cxrisk_model* m) {
  return reinterpret_cast<const ModelHandle*>(m);
}

template <typename Fn>
cxrisk_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const cxrisk::NoEventsError& e) {
    g_last_error = e.what();
    return CXRISK_ERR_NO_EVENTS;
  } catch (const cxrisk::ParseError& e) {
    g_last_error = e.what();
    return CXRISK_ERR_PARSE;
  } catch (const cxrisk::IoError& e) {
    g_last_error = e.what();
    return CXRISK_ERR_IO;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return CXRISK_ERR_INVALID;
  } catch (const std::out_of_range& e) {
    g_last_error = e.what();
    return CXRISK_ERR_INVALID;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CXRISK_ERROR;
  }
}

cxrisk_status run_command(const cxrisk_config* cfg,
                          cxrisk::RunResult (*command)(const cxrisk::RunConfig&)) {
  if (cfg == nullptr) {
    g_last_error = "config handle is NULL";
    return CXRISK_ERR_NULL;
  }
  return guarded([&]() {
    const cxrisk::RunConfig rc = cxrisk::RunConfig::from_map(unwrap(cfg)->map);
    const cxrisk::RunResult res = command(rc);
    if (res.status == cxrisk::RunStatus::partial) {
      g_last_error = std::to_string(res.subjects_failed) + " of " +
                     std::to_string(res.subjects_total) + " subjects failed";
      return CXRISK_PARTIAL;
    }
    return CXRISK_OK;
  });
}

cxrisk::FeatureMap make_map(const float* values, uint32_t c, uint32_t h, uint32_t w) {
  if (values == nullptr) throw std::invalid_argument("feature values pointer is NULL");
  cxrisk::FeatureMap fm(c, h, w);
  std::memcpy(fm.values.data(), values, fm.values.size() * sizeof(float));
  cxrisk::validate(fm);
  return fm;
}

}  // namespace

extern "C" {

const char* cxrisk_version(void) { return "0.1.0"; }

const char* cxrisk_last_error(void) { return g_last_error.c_str(); }

cxrisk_status cxrisk_config_create(cxrisk_config** out) {
  if (out == nullptr) {
    g_last_error = "output pointer is NULL";
    return CXRISK_ERR_NULL;
  }
  *out = reinterpret_cast<cxrisk_config*>(new (std::nothrow) ConfigHandle());
  if (*out == nullptr) {
    g_last_error = "allocation failed";
    return CXRISK_ERROR;
  }
  return CXRISK_OK;
}

void cxrisk_config_destroy(cxrisk_config* cfg) { delete unwrap(cfg); }

cxrisk_status cxrisk_config_load_file(cxrisk_config* cfg, const char* path) {
  if (cfg == nullptr || path == nullptr) {
    g_last_error = "NULL argument";
    return CXRISK_ERR_NULL;
  }
  return guarded([&]() {
    unwrap(cfg)->map.load_file(path);
    return CXRISK_OK;
  });
}

cxrisk_status cxrisk_config_set(cxrisk_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr) {
    g_last_error = "NULL argument";
    return CXRISK_ERR_NULL;
  }
  if (*key == '\0') {
    g_last_error = "empty config key";
    return CXRISK_ERR_INVALID;
  }
  unwrap(cfg)->map.set(key, value);
  return CXRISK_OK;
}

cxrisk_status cxrisk_config_get(const cxrisk_config* cfg, const char* key, char* buf,
                                size_t buf_len) {
  if (cfg == nullptr || key == nullptr || buf == nullptr) {
    g_last_error = "NULL argument";
    return CXRISK_ERR_NULL;
  }
  const auto& map = unwrap(cfg)->map;
  if (!map.has(key)) {
    g_last_error = std::string("config key not set: ") + key;
    return CXRISK_ERR_INVALID;
  }
  const std::string value = map.get_string(key, "");
  if (value.size() + 1 > buf_len) {
    g_last_error = "buffer too small";
    return CXRISK_ERR_BUFFER;
  }
  std::memcpy(buf, value.c_str(), value.size() + 1);
  return CXRISK_OK;
}

cxrisk_status cxrisk_run_synth(const cxrisk_config* cfg) {
  return run_command(cfg, cxrisk::run_synth);
}
cxrisk_status cxrisk_run_train(const cxrisk_config* cfg) {
  return run_command(cfg, cxrisk::run_train);
}
cxrisk_status cxrisk_run_predict(const cxrisk_config* cfg) {
  return run_command(cfg, cxrisk::run_predict);
}
cxrisk_status cxrisk_run_cam(const cxrisk_config* cfg) {
  return run_command(cfg, cxrisk::run_cam);
}
cxrisk_status cxrisk_run_complete(const cxrisk_config* cfg) {
  return run_command(cfg, cxrisk::run_complete);
}
cxrisk_status cxrisk_run_report(const cxrisk_config* cfg) {
  return run_command(cfg, cxrisk::run_report);
}
cxrisk_status cxrisk_run_evaluate(const cxrisk_config* cfg) {
  return run_command(cfg, cxrisk::run_evaluate);
}

cxrisk_status cxrisk_model_create(cxrisk_model** out, const double* weights, uint32_t channels,
                                  double bias) {
  if (out == nullptr || weights == nullptr) {
    g_last_error = "NULL argument";
    return CXRISK_ERR_NULL;
  }
  return guarded([&]() {
    auto* handle = new ModelHandle();
    handle->head.weights.assign(weights, weights + channels);
    handle->head.bias = bias;
    *out = reinterpret_cast<cxrisk_model*>(handle);
    return CXRISK_OK;
  });
}

cxrisk_status cxrisk_model_load(cxrisk_model** out, const char* path) {
  if (out == nullptr || path == nullptr) {
    g_last_error = "NULL argument";
    return CXRISK_ERR_NULL;
  }
  return guarded([&]() {
    auto* handle = new ModelHandle();
    try {
      handle->head = cxrisk::read_risk_head_json(path);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = reinterpret_cast<cxrisk_model*>(handle);
    return CXRISK_OK;
  });
}

cxrisk_status cxrisk_model_save(const cxrisk_model* model, const char* path) {
  if (model == nullptr || path == nullptr) {
    g_last_error = "NULL argument";
    return CXRISK_ERR_NULL;
  }
  return guarded([&]() {
    cxrisk::write_risk_head_json(path, unwrap(model)->head);
    return CXRISK_OK;
  });
}

void cxrisk_model_destroy(cxrisk_model* model) { delete unwrap(model); }

cxrisk_status cxrisk_model_channels(const cxrisk_model* model, uint32_t* out) {
  if (model == nullptr || out == nullptr) {
    g_last_error = "NULL argument";
    return CXRISK_ERR_NULL;
  }
  *out = static_cast<uint32_t>(unwrap(model)->head.weights.size());
  return CXRISK_OK;
}

cxrisk_status cxrisk_model_predict(const cxrisk_model* model, const float* values,
                                   uint32_t channels, uint32_t height, uint32_t width,
                                   double* risk_out) {
  if (model == nullptr || risk_out == nullptr) {
    g_last_error = "NULL argument";
    return CXRISK_ERR_NULL;
  }
  return guarded([&]() {
    const cxrisk::FeatureMap fm = make_map(values, channels, height, width);
    *risk_out = cxrisk::predict_risk(unwrap(model)->head, cxrisk::avg_pool(fm));
    return CXRISK_OK;
  });
}

cxrisk_status cxrisk_model_cam(const cxrisk_model* model, const float* values, uint32_t channels,
                               uint32_t height, uint32_t width, uint32_t out_h, uint32_t out_w,
                               double* out_values) {
  if (model == nullptr || out_values == nullptr) {
    g_last_error = "NULL argument";
    return CXRISK_ERR_NULL;
  }
  return guarded([&]() {
    const cxrisk::FeatureMap fm = make_map(values, channels, height, width);
    const cxrisk::ActivationMap cam =
        cxrisk::upsample_bilinear(cxrisk::risk_cam(fm, unwrap(model)->head), out_h, out_w);
    std::memcpy(out_values, cam.values.data(), cam.values.size() * sizeof(double));
    return CXRISK_OK;
  });
}

}  // extern "C"
