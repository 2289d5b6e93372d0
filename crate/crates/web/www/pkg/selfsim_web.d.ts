/* tslint:disable */
/* eslint-disable */

/**
 * A sampled curve with one scalar summary attached.
 */
export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Propagator: stable scale σ. Potential: max |b|. Cauchy: relative
     * energy drift.
     */
    readonly summary: number;
    readonly xs: Float64Array;
    readonly ys: Float64Array;
}

export function cauchySnapshot(delta: number, t: number, width: number, x_max: number, points: number): Curve;

export function potentialCurve(alpha: number, eps: number, x_max: number, points: number): Curve;

export function propagatorProfile(delta: number, t: number, x_max: number, points: number): Curve;

export function version(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly cauchySnapshot: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly curve_summary: (a: number) => number;
    readonly curve_xs: (a: number) => [number, number];
    readonly curve_ys: (a: number) => [number, number];
    readonly potentialCurve: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly propagatorProfile: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly version: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
