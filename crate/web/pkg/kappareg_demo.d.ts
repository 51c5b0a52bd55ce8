/* tslint:disable */
/* eslint-disable */

/**
 * Fit on the points `(xs, ys)` and predict at `points` evenly spaced x values
 * spanning them. Returns the x grid followed by the predictions.
 */
export function fit_line(xs: Float64Array, ys: Float64Array, kappa1: number, kappa2: number, points: number): Float64Array;

/**
 * Cross-validated MAE at fixed κ₁ for κ₂ = from, from + step, ..., to.
 * Returns the κ₂ values followed by the MAEs.
 */
export function kappa_sweep(csv: string, has_header: boolean, kappa1: number, kappa2_from: number, kappa2_to: number, kappa2_step: number, folds: number, seed: number): Float64Array;

/**
 * A small noisy dataset for the page to start from: two numeric features,
 * one categorical feature, target last.
 */
export function sample_csv(rows: number, seed: number): string;

/**
 * `(1 + d)^-κ` at `points` evenly spaced distances in `[0, max_distance]`.
 */
export function weight_profile(kappa: number, max_distance: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly fit_line: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly kappa_sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly sample_csv: (a: number, b: number) => [number, number];
    readonly weight_profile: (a: number, b: number, c: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
