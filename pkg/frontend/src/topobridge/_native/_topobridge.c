/*
 * C-compatible bridge surface for the differentiable field penalties.
 *
 * The library owns the token lifecycle and the forward/backward caching;
 * the mathematics itself is delegated to a registered evaluator, so this
 * code contains no independent math.  A host registers the evaluators
 * once (tb_set_topo_eval / tb_set_tv_eval) and then drives:
 *
 *   tb_ctx *t = tb_topo_create(data, h, w, c, k);   // copies data
 *   tb_topo_forward(t, &value);                     // evaluates, caches
 *                                                   // sparse gradient
 *   tb_topo_backward(t, upstream, grad_out);        // scatters
 *                                                   // upstream * coef,
 *                                                   // invalidates token
 *   tb_topo_destroy(t);
 *
 * Buffers: data is copied in create and released after the forward
 * evaluation; the cached sparse gradient is released by backward, so no
 * buffer outlives the token.  grad_out is caller-owned with h*w*c
 * doubles and is fully overwritten.  Status codes are 0 on success and
 * negative on failure (see TB_ERR_*).
 */

#include <stdint.h>
#include <stdlib.h>
#include <string.h>

#define TB_OK 0
#define TB_ERR_BAD_ARG (-1)
#define TB_ERR_NO_EVAL (-2)
#define TB_ERR_EVAL (-3)
#define TB_ERR_STALE (-4)
#define TB_ERR_NOT_EVALUATED (-5)

#define TB_MAGIC 0x746f706fu
#define TB_DEAD 0x64656164u

typedef int32_t (*tb_topo_eval_fn)(const double *data, uint32_t h, uint32_t w, uint32_t c,
                                   int32_t k, double *value_out, int64_t *nnz_out,
                                   int64_t *idx_out, double *coef_out);
typedef int32_t (*tb_tv_eval_fn)(const double *data, uint32_t h, uint32_t w, uint32_t c,
                                 double *value_out, double *grad_out);

static tb_topo_eval_fn g_topo_eval = 0;
static tb_tv_eval_fn g_tv_eval = 0;

void tb_set_topo_eval(tb_topo_eval_fn fn) { g_topo_eval = fn; }
void tb_set_tv_eval(tb_tv_eval_fn fn) { g_tv_eval = fn; }

typedef struct {
    uint32_t magic;
    uint32_t h, w, c;
    int32_t k;
    int32_t evaluated;
    double value;
    int64_t nnz;
    int64_t *idx;
    double *coef;
    double *data;
} tb_ctx;

static size_t tb_numel(const tb_ctx *ctx) {
    return (size_t)ctx->h * (size_t)ctx->w * (size_t)ctx->c;
}

tb_ctx *tb_topo_create(const double *data, uint32_t h, uint32_t w, uint32_t c, int32_t k) {
    if (!data || h == 0 || w == 0 || c == 0 || k < 0)
        return 0;
    tb_ctx *ctx = (tb_ctx *)calloc(1, sizeof(tb_ctx));
    if (!ctx)
        return 0;
    size_t n = (size_t)h * (size_t)w * (size_t)c;
    ctx->data = (double *)malloc(n * sizeof(double));
    if (!ctx->data) {
        free(ctx);
        return 0;
    }
    memcpy(ctx->data, data, n * sizeof(double));
    ctx->magic = TB_MAGIC;
    ctx->h = h;
    ctx->w = w;
    ctx->c = c;
    ctx->k = k;
    return ctx;
}

int32_t tb_topo_forward(tb_ctx *ctx, double *value_out) {
    if (!ctx || ctx->magic != TB_MAGIC)
        return TB_ERR_STALE;
    if (!value_out)
        return TB_ERR_BAD_ARG;
    if (ctx->evaluated) {
        *value_out = ctx->value;
        return TB_OK;
    }
    if (!g_topo_eval)
        return TB_ERR_NO_EVAL;
    size_t n = tb_numel(ctx);
    ctx->idx = (int64_t *)malloc(n * sizeof(int64_t));
    ctx->coef = (double *)malloc(n * sizeof(double));
    if (!ctx->idx || !ctx->coef) {
        free(ctx->idx);
        free(ctx->coef);
        ctx->idx = 0;
        ctx->coef = 0;
        return TB_ERR_BAD_ARG;
    }
    int32_t rc = g_topo_eval(ctx->data, ctx->h, ctx->w, ctx->c, ctx->k, &ctx->value,
                             &ctx->nnz, ctx->idx, ctx->coef);
    free(ctx->data);
    ctx->data = 0;
    if (rc != TB_OK || ctx->nnz < 0 || (size_t)ctx->nnz > n) {
        free(ctx->idx);
        free(ctx->coef);
        ctx->idx = 0;
        ctx->coef = 0;
        return rc != TB_OK ? TB_ERR_EVAL : TB_ERR_BAD_ARG;
    }
    ctx->evaluated = 1;
    *value_out = ctx->value;
    return TB_OK;
}

int32_t tb_topo_backward(tb_ctx *ctx, double upstream, double *grad_out) {
    if (!ctx || ctx->magic != TB_MAGIC)
        return TB_ERR_STALE;
    if (!grad_out)
        return TB_ERR_BAD_ARG;
    if (!ctx->evaluated)
        return TB_ERR_NOT_EVALUATED;
    size_t n = tb_numel(ctx);
    memset(grad_out, 0, n * sizeof(double));
    for (int64_t i = 0; i < ctx->nnz; ++i)
        grad_out[ctx->idx[i]] = upstream * ctx->coef[i];
    /* one backward per token: release the cache and invalidate */
    free(ctx->idx);
    free(ctx->coef);
    ctx->idx = 0;
    ctx->coef = 0;
    ctx->evaluated = 0;
    ctx->magic = TB_DEAD;
    return TB_OK;
}

void tb_topo_destroy(tb_ctx *ctx) {
    if (!ctx || (ctx->magic != TB_MAGIC && ctx->magic != TB_DEAD))
        return;
    free(ctx->idx);
    free(ctx->coef);
    free(ctx->data);
    ctx->magic = 0;
    free(ctx);
}

int32_t tb_tv_forward_backward(const double *data, uint32_t h, uint32_t w, uint32_t c,
                               double *value_out, double *grad_out) {
    if (!data || !value_out || !grad_out || h == 0 || w == 0 || c == 0)
        return TB_ERR_BAD_ARG;
    if (!g_tv_eval)
        return TB_ERR_NO_EVAL;
    int32_t rc = g_tv_eval(data, h, w, c, value_out, grad_out);
    return rc == TB_OK ? TB_OK : TB_ERR_EVAL;
}
