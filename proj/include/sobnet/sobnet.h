#ifndef SOBNET_SOBNET_H
#define SOBNET_SOBNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SOBNET_API __declspec(dllexport)
#else
#define SOBNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Return codes. Every function returns one of these; details via sobnet_last_error. */
typedef enum sobnet_status {
    SOBNET_OK = 0,
    SOBNET_INVALID_ARGUMENT = 1,
    SOBNET_DIMENSION_MISMATCH = 2,
    SOBNET_UNKNOWN_ACTIVATION = 3,
    SOBNET_ORDER_EXCEEDS_SMOOTHNESS = 4,
    SOBNET_UNSUPPORTED = 5,
    SOBNET_CONTRACT_FAILURE = 6,
    SOBNET_NOT_ENCODABLE = 7,
    SOBNET_DECODE_ERROR = 8,
    SOBNET_IO_ERROR = 9,
    SOBNET_INTERNAL = 10
} sobnet_status;

typedef struct sobnet_network sobnet_network;
typedef struct sobnet_scheme sobnet_scheme;

/* Message of the last failing call on this thread; empty after success. */
SOBNET_API const char* sobnet_last_error(void);
SOBNET_API const char* sobnet_status_name(int status);

/* Strings and byte buffers returned through out-parameters are released here. */
SOBNET_API void sobnet_free(void* p);

/* Activations */
SOBNET_API int sobnet_catalog_json(char** out_json);
/* values must hold order + 1 doubles; one_sided may be NULL. */
SOBNET_API int sobnet_eval(const char* activation, double x, int order, double* values, int* one_sided);
SOBNET_API int sobnet_admissibility_json(const char* activation, double x_lo, double x_hi, int order,
                                         char** out_json);

/* Partitions of unity. s <= 0 selects the scaling from the decay class (mu for exponential,
   n and the sup norm for polynomial decay), floored at max(2R/3, 1). */
SOBNET_API int sobnet_verify_pu_json(const char* activation, int d, int N, double s, double mu, int n, int k_max,
                                     int grid_per_patch, char** out_json);

/* Networks */
SOBNET_API int sobnet_network_load(const char* path, sobnet_network** out);
SOBNET_API int sobnet_network_save(const sobnet_network* net, const char* path);
SOBNET_API int sobnet_network_from_json(const char* text, sobnet_network** out);
SOBNET_API int sobnet_network_to_json(const sobnet_network* net, char** out_json);
SOBNET_API int sobnet_network_stats_json(const sobnet_network* net, char** out_json);
SOBNET_API int sobnet_network_dims(const sobnet_network* net, int* input_dim, int* output_dim, int* depth);
SOBNET_API void sobnet_network_free(sobnet_network* net);
/* xs holds points * input_dim values row-major; out receives points * output_dim values. */
SOBNET_API int sobnet_realize(const sobnet_network* net, const double* xs, size_t points, double* out);
/* alpha holds input_dim nonnegative orders. */
SOBNET_API int sobnet_derivative(const sobnet_network* net, const double* x, const int* alpha, int output,
                                 double* value);
/* target: corpus name or expression in x, y, z. p < 0 means the sup norm. */
SOBNET_API int sobnet_sobolev_distance_json(const sobnet_network* net, const char* target, int k, double p,
                                            int grid_n, int finite_difference, char** out_json);

/* Synthesis. Ctilde <= 0 uses the cached or freshly calibrated constant; p < 0 means the sup norm. */
SOBNET_API int sobnet_calibrate_ctilde(const char* activation, int d, int n, int k, double p, double mu,
                                       double* out);
SOBNET_API int sobnet_set_ctilde(const char* activation, int d, int n, int k, double p, double mu, double value);
/* Validates a request and reports the derived plan (N, s, sub-accuracy, theta, T, L). */
SOBNET_API int sobnet_plan_json(const char* activation, double eps, int n, int k, double p, int d, double mu,
                                double Ctilde, char** out_json);
SOBNET_API int sobnet_synthesize(const char* activation, const char* target, int d, double eps, int n, int k,
                                 double p, double mu, double Ctilde, uint64_t seed, sobnet_network** out_net,
                                 char** out_report);
/* Rate sweep over count decreasing eps values. */
SOBNET_API int sobnet_sweep_json(const char* activation, const char* target, int d, const double* eps, size_t count,
                                 int n, int k, double p, double mu, double Ctilde, uint64_t seed, char** out_json);

/* Codec. In sobnet_scheme_create, theta <= 0 takes the smallest exponent covering the last layer and
   nu <= 0 measures nu from the W^{k,inf} sizes of the last hidden units; C0 <= 0 starts at theta + nu + 1
   and adds 1 until 2^K covers the dictionary. */
SOBNET_API int sobnet_round_output_layer(const sobnet_network* net, double eps, double theta, double nu,
                                         sobnet_network** out);
SOBNET_API int sobnet_scheme_create(const sobnet_network* net, double eps, double theta, double nu, int k, double C0,
                                    sobnet_scheme** out);
SOBNET_API int sobnet_scheme_open(const char* activation, double C0, double eps, double theta, double nu,
                                  sobnet_scheme** out);
SOBNET_API int sobnet_scheme_json(const sobnet_scheme* scheme, char** out_json);
SOBNET_API void sobnet_scheme_free(sobnet_scheme* scheme);
SOBNET_API int sobnet_encode(const sobnet_network* net, const sobnet_scheme* scheme, uint8_t** bytes,
                             size_t* nbytes, uint64_t* bits);
/* bits == 0 accepts a byte-padded stream. */
SOBNET_API int sobnet_decode(const sobnet_scheme* scheme, const uint8_t* bytes, size_t nbytes, uint64_t bits,
                             sobnet_network** out);
SOBNET_API int sobnet_stream_constants(const uint8_t* bytes, size_t nbytes, double* C0, double* eps);
SOBNET_API int sobnet_entropy_floor(double gamma, double C, double eps, double* out);

#ifdef __cplusplus
}
#endif

#endif
