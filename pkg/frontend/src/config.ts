// API base path; the build step rewrites this from SODA_API_BASE when the
// UI is hosted separately from the service. Empty means same origin.
export const API_BASE = "";
