/** Error categories mapped to exit codes (config -> 1, data -> 2). */

export class ConfigError extends Error {}

export class DataError extends Error {}
