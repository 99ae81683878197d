/* tslint:disable */
/* eslint-disable */

/**
 * Alpha-Beta log-det divergence between `Diag(a)` and a rotated `Diag(b)`.
 */
export function ablogdetSweep(a: Float64Array, b: Float64Array, alpha: number, beta: number, steps: number): Float64Array;

/**
 * `d_q(A, B)^q` between `Diag(a)` and a rotated `Diag(b)`.
 */
export function distanceSweep(a: Float64Array, b: Float64Array, q: number, steps: number): Float64Array;

/**
 * `S_f(A B)` with `A = Diag(a)` and `B` a rotated `Diag(b)`; `f` is `x^q`.
 */
export function productSweep(a: Float64Array, b: Float64Array, q: number, steps: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly ablogdetSweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly distanceSweep: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly productSweep: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
