/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_reconstructioncomparison_free: (a: number, b: number) => void;
export const compareReconstruction: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const errorVsResolution: (a: number, b: number, c: number) => [number, number, number, number];
export const reconstructioncomparison_bilinearMaeDeg: (a: number) => number;
export const reconstructioncomparison_pidsrMaeDeg: (a: number) => number;
export const reconstructioncomparison_rgba: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const reconstructioncomparison_size: (a: number) => number;
export const renderScene: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
