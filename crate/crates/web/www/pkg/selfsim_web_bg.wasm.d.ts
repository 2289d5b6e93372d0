/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curve_free: (a: number, b: number) => void;
export const cauchySnapshot: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const curve_summary: (a: number) => number;
export const curve_xs: (a: number) => [number, number];
export const curve_ys: (a: number) => [number, number];
export const potentialCurve: (a: number, b: number, c: number, d: number) => [number, number, number];
export const propagatorProfile: (a: number, b: number, c: number, d: number) => [number, number, number];
export const version: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
