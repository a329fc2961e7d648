/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const atlas_json: (a: number, b: number, c: number) => [number, number];
export const pinch_json: (a: number, b: number, c: number, d: number) => [number, number];
export const random_motion_json: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
